//! The doubled space `Ŵ × ℝ_s × S¹_θ` and its structures.
//!
//! - `λᴰ = λ + 2s dθ`, `Zᴰ = Z + s ∂s`, `ψᴰ = ψ + s²`, `fᴰ = s² + f`
//! - `Jᴰ = J ⊕ (∂s ↦ ∂θ)`
//! - `h = λ(∂φ_θ/∂θ)` for the fiber rotation family `φ_θ`
//! - `λ_t = λ + (2s + t h) dθ`

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adcalc::chart::ChartSpec;
use crate::adcalc::dual::{seed, Dual};
use crate::adcalc::field::{OneForm, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::weinstein::cutoff::RegularEquation;
use crate::weinstein::model::WeinsteinModel;
use crate::weinstein::sampling::sample_surface_points;

/// Number of surface samples `double` inspects for transversality.
pub const TRANSVERSALITY_SAMPLES: usize = 256;

#[derive(Clone, Debug)]
pub struct DoubledSpace<R> {
    model: WeinsteinModel<R>,
    f: RegularEquation<R>,
    chart: Arc<ChartSpec>,
}

/// Builds the doubled space and checks `dfᴰ(Zᴰ) > 0` on sampled points of
/// `{fᴰ = 0}`.
pub fn double<R: Real>(model: &WeinsteinModel<R>, f: RegularEquation<R>) -> Result<DoubledSpace<R>> {
    let ds = double_unchecked(model, f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for x in sample_surface_points(&ds, TRANSVERSALITY_SAMPLES, &mut rng) {
        let v = ds.transversality(&x);
        if !(v > R::zero()) {
            return Err(Error::Transversality { witness: x.iter().map(|c| c.as_f64()).collect(), value: v.as_f64() });
        }
    }
    Ok(ds)
}

/// Builds the doubled space without the sampled transversality check.
pub fn double_unchecked<R: Real>(model: &WeinsteinModel<R>, f: RegularEquation<R>) -> Result<DoubledSpace<R>> {
    let mut names: Vec<String> = model.chart().names().to_vec();
    names.push("s".into());
    names.push("theta".into());
    let mut periodic = model.chart().periodic_mask().to_vec();
    periodic.push(false);
    periodic.push(true);
    let chart = ChartSpec::new(&names, &periodic)?;
    Ok(DoubledSpace { model: model.clone(), f, chart })
}

impl<R: Real> DoubledSpace<R> {
    pub fn model(&self) -> &WeinsteinModel<R> {
        &self.model
    }

    pub fn equation(&self) -> &RegularEquation<R> {
        &self.f
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn s_index(&self) -> usize {
        self.dim() - 2
    }

    pub fn theta_index(&self) -> usize {
        self.dim() - 1
    }

    /// Same space with another regular equation.
    pub fn with_equation(&self, f: RegularEquation<R>) -> Self {
        DoubledSpace { model: self.model.clone(), f, chart: Arc::clone(&self.chart) }
    }

    pub fn lambda_d<S: Scalar<Real = R>>(&self, x: &[S], v: &[S]) -> S {
        let (is, it) = (self.s_index(), self.theta_index());
        self.model.lambda(x, v) + (x[is] + x[is]) * v[it]
    }

    pub fn lambda_t<S: Scalar<Real = R>>(&self, x: &[S], v: &[S], t: R) -> S {
        let (is, it) = (self.s_index(), self.theta_index());
        let coeff = x[is] + x[is] + self.h(x).scale(t);
        self.model.lambda(x, v) + coeff * v[it]
    }

    pub fn z_d<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S> {
        let mut z = self.model.liouville(&x[..self.model.dim()]);
        z.push(x[self.s_index()]);
        z.push(S::zero());
        z
    }

    pub fn psi_d<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        let s = x[self.s_index()];
        self.model.psi(x) + s * s
    }

    pub fn f<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        self.f.f(x)
    }

    pub fn f_d<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        let s = x[self.s_index()];
        s * s + self.f.f(x)
    }

    /// `df(Z)` on the `Ŵ` factor.
    pub fn df_z<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        let w = &x[..self.model.dim()];
        let z = self.model.liouville(w);
        self.f.f(&seed(w, &z)).eps
    }

    /// `dfᴰ(Zᴰ) = 2s² + df(Z)`.
    pub fn transversality<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        let s = x[self.s_index()];
        s * s + s * s + self.df_z(x)
    }

    pub fn j_d<S: Scalar<Real = R>>(&self, v: &[S]) -> Vec<S> {
        let w = self.model.dim();
        let mut out = self.model.j_apply(&v[..w]);
        out.push(-v[w + 1]);
        out.push(v[w]);
        out
    }

    /// `h = λ_{φ_θ(p)}(∂φ_θ/∂θ(p))` with θ the point's own angle.
    pub fn h<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        let w = self.model.dim();
        let p: Vec<Dual<S>> = x[..w].iter().map(|&a| Dual::constant(a)).collect();
        let angle = Dual::variable(x[self.theta_index()]);
        let moved = self.model.rotate_fiber(&p, angle);
        let point: Vec<S> = moved.iter().map(|d| d.re).collect();
        let generator: Vec<S> = moved.iter().map(|d| d.eps).collect();
        self.model.lambda(&point, &generator)
    }

    pub fn lambda_d_form(&self) -> LambdaD<'_, R> {
        LambdaD(self)
    }

    pub fn lambda_t_form(&self, t: R) -> LambdaT<'_, R> {
        LambdaT { ds: self, t }
    }

    pub fn z_d_field(&self) -> LiouvilleD<'_, R> {
        LiouvilleD(self)
    }

    pub fn f_d_field(&self) -> EquationD<'_, R> {
        EquationD(self)
    }

    pub fn psi_d_field(&self) -> ExhaustionD<'_, R> {
        ExhaustionD(self)
    }

    pub fn h_field(&self) -> RotationHamiltonian<'_, R> {
        RotationHamiltonian(self)
    }
}

pub struct LambdaD<'a, R>(pub &'a DoubledSpace<R>);

impl<R: Real> OneForm<R> for LambdaD<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], v: &[S]) -> S {
        self.0.lambda_d(x, v)
    }
}

pub struct LambdaT<'a, R> {
    pub ds: &'a DoubledSpace<R>,
    pub t: R,
}

impl<R: Real> OneForm<R> for LambdaT<'_, R> {
    fn dim(&self) -> usize {
        self.ds.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], v: &[S]) -> S {
        self.ds.lambda_t(x, v, self.t)
    }
}

pub struct LiouvilleD<'a, R>(pub &'a DoubledSpace<R>);

impl<R: Real> VectorField<R> for LiouvilleD<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S> {
        self.0.z_d(x)
    }
}

pub struct EquationD<'a, R>(pub &'a DoubledSpace<R>);

impl<R: Real> ScalarField<R> for EquationD<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        self.0.f_d(x)
    }
}

pub struct ExhaustionD<'a, R>(pub &'a DoubledSpace<R>);

impl<R: Real> ScalarField<R> for ExhaustionD<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        self.0.psi_d(x)
    }
}

pub struct RotationHamiltonian<'a, R>(pub &'a DoubledSpace<R>);

impl<R: Real> ScalarField<R> for RotationHamiltonian<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        self.0.h(x)
    }
}
