//! Scalar abstractions.
//!
//! [`Real`] is the floating point type a computation is carried out in
//! (`f32` or `f64`). [`Scalar`] is anything a field evaluator can be run on:
//! a plain real, or a (possibly nested) dual number over one. Every evaluator
//! in this crate is written once against [`Scalar`], so the same code yields
//! values, first derivatives, and derivatives of quantities that themselves
//! contain a derivative.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::float::FloatCore;
use num_traits::{FloatConst, FromPrimitive, One, Zero};

/// A number an evaluator can be run on.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Zero
    + One
    + Sum
{
    type Real: Real;

    fn from_real(x: Self::Real) -> Self;

    /// Primal value with all infinitesimal parts dropped.
    fn value(&self) -> Self::Real;

    /// True if the primal value and every derivative part is finite.
    fn all_finite(&self) -> bool;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;

    fn square(self) -> Self {
        self * self
    }

    fn lit(x: f64) -> Self {
        Self::from_real(<Self::Real as FromPrimitive>::from_f64(x).expect("finite literal"))
    }

    fn scale(self, k: Self::Real) -> Self {
        self * Self::from_real(k)
    }
}

/// Floating point: f32 or f64.
pub trait Real: FloatCore + FloatConst + FromPrimitive + Scalar<Real = Self> + Display + Default {
    fn atan2(self, other: Self) -> Self;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two_pi() -> Self {
        Self::TAU()
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;

            #[inline]
            fn from_real(x: $t) -> Self {
                x
            }
            #[inline]
            fn value(&self) -> $t {
                *self
            }
            #[inline]
            fn all_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
            #[inline]
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            #[inline]
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            #[inline]
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            #[inline]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
        }

        impl Real for $t {
            #[inline]
            fn atan2(self, other: Self) -> Self {
                <$t>::atan2(self, other)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Integer power by repeated multiplication (works for any scalar).
pub fn powi<S: Scalar>(x: S, n: u32) -> S {
    let mut acc = S::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}
