//! Weinstein models, the cutoff regular equation, the doubled space and
//! their pointwise checks.

pub mod checks;
pub mod cutoff;
pub mod double;
pub mod model;
pub mod sampling;

pub use checks::{almost_stein_check, contact_volume_check};
pub use cutoff::{cutoff_equation, CutoffSpec, RegularEquation};
pub use double::{double, DoubledSpace};
pub use model::{make_flat_model, make_model, make_torus_model, ModelKind, WeinsteinModel};
