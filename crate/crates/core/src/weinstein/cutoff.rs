//! Cutoff regular equation `f = χ(ψ − c)`.
//!
//! `χ(x) = x` on `|x| ≤ a`, `χ = ±1` on `|x| ≥ 2a`, and on `[a, 2a]`
//! `χ = (1 − β) x + β` with the flat-ended step
//! `β(t) = 1 / (1 + e^{1/t − 1/(1−t)})`, `t = (x − a)/a`; odd extension to
//! `x < 0`. All derivatives match at both seams, and
//! `χ' = (1 − β) + (1 − x) β' > 0` on the band because `2a < 1`.

use serde::Serialize;

use crate::adcalc::field::ScalarField;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::weinstein::model::WeinsteinModel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffSpec<R> {
    a: R,
}

impl<R: Real> CutoffSpec<R> {
    pub fn new(a: R) -> Result<Self> {
        if !(a > R::zero()) || !a.is_finite() {
            return Err(Error::Config(format!("cutoff scale a = {a} must be positive")));
        }
        if a >= R::lit(0.5) {
            return Err(Error::Config(format!("cutoff scale a = {a} must be below 1/2 to reach the plateaus monotonically")));
        }
        Ok(CutoffSpec { a })
    }

    /// `a = (c − min ψ_F) / 4`.
    pub fn for_model(model: &WeinsteinModel<R>) -> Result<Self> {
        Self::new((model.c() - model.min_psi_f()) / R::lit(4.0))
    }

    pub fn a(&self) -> R {
        self.a
    }

    pub fn chi<S: Scalar<Real = R>>(&self, x: S) -> S {
        let v = x.value();
        let a = self.a;
        if v.abs() <= a {
            return x;
        }
        let two_a = a + a;
        if v >= two_a {
            return S::one();
        }
        if v <= -two_a {
            return -S::one();
        }
        let (sign, ax) = if v < R::zero() { (-R::one(), -x) } else { (R::one(), x) };
        let t = (ax - S::from_real(a)) * S::from_real(R::one() / a);
        let u = S::one() / t - S::one() / (S::one() - t);
        // beyond ±700 the step is 0 or 1 to double precision, derivatives included
        let limit = R::lit(700.0);
        let beta = if u.value() > limit {
            S::zero()
        } else if u.value() < -limit {
            S::one()
        } else {
            S::one() / (S::one() + u.exp())
        };
        (ax * (S::one() - beta) + beta).scale(sign)
    }
}

/// Which regular equation of `M = {ψ = c}` to use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EquationKind<R> {
    /// `ψ − c`
    Shifted,
    /// `χ(ψ − c)`
    Cutoff(CutoffSpec<R>),
}

/// A regular equation `f` of `M` on `Ŵ`.
#[derive(Clone, Debug)]
pub struct RegularEquation<R> {
    model: WeinsteinModel<R>,
    kind: EquationKind<R>,
}

impl<R: Real> RegularEquation<R> {
    pub fn shifted(model: &WeinsteinModel<R>) -> Self {
        RegularEquation { model: model.clone(), kind: EquationKind::Shifted }
    }

    pub fn kind(&self) -> EquationKind<R> {
        self.kind
    }

    pub fn model(&self) -> &WeinsteinModel<R> {
        &self.model
    }

    /// `f` at a point of `Ŵ` (extra trailing coordinates are ignored).
    pub fn f<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        let u = self.model.psi(x) - S::from_real(self.model.c());
        match self.kind {
            EquationKind::Shifted => u,
            EquationKind::Cutoff(spec) => spec.chi(u),
        }
    }
}

pub fn cutoff_equation<R: Real>(model: &WeinsteinModel<R>, spec: CutoffSpec<R>) -> RegularEquation<R> {
    RegularEquation { model: model.clone(), kind: EquationKind::Cutoff(spec) }
}

impl<R: Real> ScalarField<R> for RegularEquation<R> {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        self.f(x)
    }
}
