//! Coordinate-chart calculus with forward-mode automatic differentiation.

pub mod chart;
pub mod dual;
pub mod exterior;
pub mod field;
pub mod level_set;

pub use chart::{ChartPoint, ChartSpec, TangentVector};
pub use dual::Dual;
pub use exterior::{d_oneform, exterior_derivative, lie_derivative_oneform, pullback_oneform, Covector};
pub use field::{MapWithJacobian, OneForm, ScalarField, SmoothMap, TimeDependentField, TwoForm, VectorField};
pub use level_set::{tangent_basis_of_level_set, tangent_basis_of_level_set_seeded};
