//! Numerical verification of the contactomorphism `Ψ_c` of a doubled
//! Weinstein domain times a circle, and of the determinant winding number
//! that obstructs its iterates from being contact isotopic to the identity.
//!
//! Core code is generic over the floating point type ([`scalar::Real`]);
//! the aliases below fix it to `f64`.

// `!(x < tol)` is deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adcalc;
pub mod error;
pub mod flows;
pub mod invariant;
pub mod linalg;
pub mod scalar;
pub mod suites;
pub mod weinstein;

pub use error::{Error, Result};

pub type Model = weinstein::WeinsteinModel<f64>;
pub type Doubled = weinstein::DoubledSpace<f64>;
pub type Point = adcalc::ChartPoint<f64>;
pub type Loop = invariant::MatrixLoop<f64>;
