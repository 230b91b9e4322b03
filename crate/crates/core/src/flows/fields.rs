//! The explicit vector fields on the doubled space.
//!
//! - `X_t = (f1 − f0) / df_tᴰ(Zᴰ) · Zᴰ` with `f_t = t f1 + (1 − t) f0`
//! - `Y = h / (2 dfᴰ(Zᴰ)) · (2s Z − df(Z) ∂s)`

use crate::adcalc::dual::seed;
use crate::adcalc::field::TimeDependentField;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::weinstein::cutoff::RegularEquation;
use crate::weinstein::double::DoubledSpace;

/// Denominators below this magnitude are reported as singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-8;

fn to_f64<R: Real>(x: &[R]) -> Vec<f64> {
    x.iter().map(|v| v.as_f64()).collect()
}

/// The `[0, 1]`-parametric field relating the doubles of `f0` and `f1`.
#[derive(Clone, Debug)]
pub struct DoubleEquivField<R> {
    ds: DoubledSpace<R>,
    f0: RegularEquation<R>,
    f1: RegularEquation<R>,
}

pub fn double_equiv_field<R: Real>(f0: &RegularEquation<R>, f1: &RegularEquation<R>, ds: &DoubledSpace<R>) -> DoubleEquivField<R> {
    DoubleEquivField { ds: ds.clone(), f0: f0.clone(), f1: f1.clone() }
}

impl<R: Real> DoubleEquivField<R> {
    /// `f_tᴰ = s² + t f1 + (1 − t) f0`.
    pub fn f_t_d<S: Scalar<Real = R>>(&self, x: &[S], t: R) -> S {
        let s = x[self.ds.s_index()];
        s * s + self.f1.f(x).scale(t) + self.f0.f(x).scale(R::one() - t)
    }

    /// `df_tᴰ(Zᴰ) = 2s² + t df1(Z) + (1 − t) df0(Z)`.
    pub fn denominator<S: Scalar<Real = R>>(&self, x: &[S], t: R) -> S {
        let w = &x[..self.ds.model().dim()];
        let dz = seed(w, &self.ds.model().liouville(w));
        let s = x[self.ds.s_index()];
        s * s + s * s + self.f1.f(&dz).eps.scale(t) + self.f0.f(&dz).eps.scale(R::one() - t)
    }

    /// `(f1 − f0) / df_tᴰ(Zᴰ)`.
    pub fn coefficient<S: Scalar<Real = R>>(&self, x: &[S], t: R) -> S {
        (self.f1.f(x) - self.f0.f(x)) / self.denominator(x, t)
    }

    pub fn space(&self) -> &DoubledSpace<R> {
        &self.ds
    }

    pub fn f0(&self) -> &RegularEquation<R> {
        &self.f0
    }

    pub fn f1(&self) -> &RegularEquation<R> {
        &self.f1
    }
}

impl<R: Real> TimeDependentField<R> for DoubleEquivField<R> {
    fn dim(&self) -> usize {
        self.ds.dim()
    }

    fn eval<S: Scalar<Real = R>>(&self, x: &[S], t: R) -> Vec<S> {
        let k = self.coefficient(x, t);
        self.ds.z_d(x).into_iter().map(|z| k * z).collect()
    }

    fn check(&self, x: &[R], t: R) -> Result<()> {
        let d = self.denominator(x, t);
        if d.abs() < R::lit(SINGULAR_DENOMINATOR) {
            return Err(Error::SingularDenominator { field: "double equivalence", point: to_f64(x), value: d.as_f64() });
        }
        Ok(())
    }
}

/// Gray field of the path `λ_t = λ + (2s + t h) dθ`. Time independent.
#[derive(Clone, Debug)]
pub struct GrayField<R> {
    ds: DoubledSpace<R>,
    rate: R,
}

/// Gray field for the fiber rotation family.
pub fn gray_field<R: Real>(ds: &DoubledSpace<R>) -> GrayField<R> {
    GrayField { ds: ds.clone(), rate: R::one() }
}

/// Gray field for the family rotating the fiber at `rate` per unit θ, whose
/// rotation Hamiltonian is `rate·h`. Rate zero is the identity family.
pub fn gray_field_with_rate<R: Real>(ds: &DoubledSpace<R>, rate: R) -> GrayField<R> {
    GrayField { ds: ds.clone(), rate }
}

impl<R: Real> GrayField<R> {
    /// `2 dfᴰ(Zᴰ)`.
    pub fn denominator<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        let t = self.ds.transversality(x);
        t + t
    }

    pub fn value<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S> {
        let w = self.ds.model().dim();
        let s = x[self.ds.s_index()];
        let dfz = self.ds.df_z(x);
        let k = self.ds.h(x).scale(self.rate) / self.denominator(x);
        let two_s_k = (s + s) * k;
        let mut y: Vec<S> = self.ds.model().liouville(&x[..w]).into_iter().map(|z| two_s_k * z).collect();
        y.push(-(dfz * k));
        y.push(S::zero());
        y
    }
}

impl<R: Real> TimeDependentField<R> for GrayField<R> {
    fn dim(&self) -> usize {
        self.ds.dim()
    }

    fn eval<S: Scalar<Real = R>>(&self, x: &[S], _t: R) -> Vec<S> {
        self.value(x)
    }

    fn check(&self, x: &[R], _t: R) -> Result<()> {
        let d = self.denominator(x);
        if d.abs() < R::lit(SINGULAR_DENOMINATOR) {
            return Err(Error::SingularDenominator { field: "gray", point: to_f64(x), value: d.as_f64() });
        }
        Ok(())
    }
}
