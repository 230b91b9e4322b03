//! Forward-mode dual numbers `re + eps·ε` with `ε² = 0`.
//!
//! `Dual<S>` is itself a [`Scalar`], so duals nest: `Dual<Dual<f64>>` carries
//! two independent infinitesimals and is what evaluators use when a derivative
//! has to be differentiated again (for example the Jacobian of a vector field
//! whose definition contains `df(Z)`).

use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    #[inline]
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }

    #[inline]
    pub fn constant(re: S) -> Self {
        Dual { re, eps: S::zero() }
    }

    #[inline]
    pub fn variable(re: S) -> Self {
        Dual { re, eps: S::one() }
    }
}

/// `x + ε·v` componentwise.
pub fn seed<S: Scalar>(x: &[S], v: &[S]) -> Vec<Dual<S>> {
    debug_assert_eq!(x.len(), v.len());
    x.iter().zip(v).map(|(&a, &b)| Dual::new(a, b)).collect()
}

/// Embeds plain values as constants (zero tangent).
pub fn constants<S: Scalar>(x: &[S]) -> Vec<Dual<S>> {
    x.iter().map(|&a| Dual::constant(a)).collect()
}

/// Lifts reals into an arbitrary scalar type.
pub fn lift<S: Scalar>(x: &[S::Real]) -> Vec<S> {
    x.iter().map(|&a| S::from_real(a)).collect()
}

pub fn primal<S: Scalar>(x: &[Dual<S>]) -> Vec<S> {
    x.iter().map(|d| d.re).collect()
}

pub fn tangent<S: Scalar>(x: &[Dual<S>]) -> Vec<S> {
    x.iter().map(|d| d.eps).collect()
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = S::one() / o.re;
        let q = self.re * inv;
        Dual::new(q, (self.eps - q * o.eps) * inv)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<S: Scalar> AddAssign for Dual<S> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Scalar> SubAssign for Dual<S> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<S: Scalar> MulAssign for Dual<S> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<S: Scalar> Zero for Dual<S> {
    fn zero() -> Self {
        Dual::new(S::zero(), S::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<S: Scalar> One for Dual<S> {
    fn one() -> Self {
        Dual::constant(S::one())
    }
}

impl<S: Scalar> Sum for Dual<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    type Real = S::Real;

    #[inline]
    fn from_real(x: S::Real) -> Self {
        Dual::constant(S::from_real(x))
    }

    #[inline]
    fn value(&self) -> S::Real {
        self.re.value()
    }

    fn all_finite(&self) -> bool {
        self.re.all_finite() && self.eps.all_finite()
    }

    #[inline]
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.re.cos() * self.eps)
    }

    #[inline]
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.re.sin() * self.eps))
    }

    #[inline]
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, e * self.eps)
    }

    #[inline]
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.eps / self.re)
    }

    #[inline]
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.eps / (s + s))
    }
}

/// Derivative of a univariate function at `x`.
pub fn derivative<R, F>(f: F, x: R) -> R
where
    R: crate::scalar::Real,
    F: Fn(Dual<R>) -> Dual<R>,
{
    f(Dual::variable(x)).eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::powi;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn elementary_derivatives() {
        let x = 0.7_f64;
        assert!(close(derivative(|d| d.sin(), x), x.cos(), 1e-15));
        assert!(close(derivative(|d| d.cos(), x), -x.sin(), 1e-15));
        assert!(close(derivative(|d| d.exp(), x), x.exp(), 1e-15));
        assert!(close(derivative(|d| d.ln(), x), 1.0 / x, 1e-15));
        assert!(close(derivative(|d| d.sqrt(), x), 0.5 / x.sqrt(), 1e-15));
        assert!(close(derivative(|d| powi(d, 5), x), 5.0 * x.powi(4), 1e-15));
        assert!(close(derivative(|d| powi(d, 0), x), 0.0, 0.0));
        assert!(close(derivative(|d| d / (d * d + Dual::constant(1.0)), x), (1.0 - x * x) / (1.0 + x * x).powi(2), 1e-14));
    }

    #[test]
    fn nested_duals_give_second_derivative() {
        // d²/dx² sin(x)·x³ via two independent infinitesimals.
        let x = 1.3_f64;
        let xd: Dual<Dual<f64>> = Dual::new(Dual::variable(x), Dual::constant(1.0));
        let y = xd.sin() * powi(xd, 3);
        let exact = -x.sin() * x.powi(3) + 6.0 * x.cos() * x * x + 6.0 * x * x.sin();
        assert!(close(y.eps.eps, exact, 1e-13));
        // Mixed parts agree: both first derivatives are equal.
        assert!(close(y.eps.re, y.re.eps, 1e-15));
    }

    #[test]
    fn works_in_single_precision() {
        let d = derivative(|d: Dual<f32>| d * d * d, 2.0_f32);
        assert!((d - 12.0).abs() < 1e-5);
    }

    #[test]
    fn finiteness_covers_tangent() {
        let d = Dual::new(1.0_f64, f64::INFINITY);
        assert!(!d.all_finite());
        assert!(Dual::new(1.0_f64, 2.0).all_finite());
    }
}
