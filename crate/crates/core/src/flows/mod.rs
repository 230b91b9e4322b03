//! Time-dependent flows with Jacobian transport, the explicit fields `X_t`
//! and `Y`, the maps `Ψ` and `Ψ_c`, and conformality measurement.

pub mod conformal;
pub mod equivalence;
pub mod fields;
pub mod integrator;
pub mod psi;

pub use conformal::{conformality_between, conformality_residual, Conformality};
pub use equivalence::{double_equivalence_flow, DoubleEquivMap};
pub use fields::{double_equiv_field, gray_field, DoubleEquivField, GrayField};
pub use integrator::{integrate_flow, FlowOptions, FlowResult, Tolerances};
pub use psi::{psi_c, psi_rotation, PsiC, PsiRotation};
