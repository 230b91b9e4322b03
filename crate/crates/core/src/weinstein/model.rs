//! Built-in Weinstein models `Ŵ = F × ℂ`.
//!
//! Flat model of complex dimension `n`: coordinates `x1, y1, …, xn, yn`, the
//! last pair being the stabilizing `ℂ` factor.
//!
//! - `λ = Σ (x dy − y dx)`, `dλ = 2 Σ dx∧dy`
//! - `Z = ½ Σ (x ∂x + y ∂y)`
//! - `ψ = Σ r²`, `J ∂x = ∂y`
//! - `λ = κ (−dψ∘J)` with `κ = ½`
//!
//! Torus model `T*Tⁿ × ℂ`: coordinates `q1…qn` (periodic), `p1…pn`, `x`, `y`.
//!
//! - `λ = Σ p dq + (x dy − y dx)`, `dλ = Σ dp∧dq + 2 dx∧dy`
//! - `Z = Σ p ∂p + ½ (x ∂x + y ∂y)`
//! - `ψ = Σ p² + x² + y²`, `J ∂p = ∂q`, `J ∂q = −∂p`
//! - `−dψ∘J = 2 Σ p dq + 2 (x dy − y dx) = 2λ`, so again `κ = ½`
//!
//! Both have `c = 1` and `min ψ_F = 0` at `q0 = 0`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adcalc::chart::ChartSpec;
use crate::adcalc::field::{OneForm, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Flat,
    Torus,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Flat => "flat",
            ModelKind::Torus => "torus",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(ModelKind::Flat),
            "torus" => Ok(ModelKind::Torus),
            other => Err(Error::Config(format!("unknown model `{other}` (expected flat or torus)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeinsteinModel<R> {
    kind: ModelKind,
    n: usize,
    chart: Arc<ChartSpec>,
    c: R,
    kappa: R,
}

pub fn make_flat_model<R: Real>(n: usize) -> Result<WeinsteinModel<R>> {
    if n == 0 {
        return Err(Error::Config("flat model needs n >= 1".into()));
    }
    let mut names = Vec::with_capacity(2 * n);
    for i in 1..=n {
        names.push(format!("x{i}"));
        names.push(format!("y{i}"));
    }
    let chart = ChartSpec::new(&names, &vec![false; 2 * n])?;
    Ok(WeinsteinModel { kind: ModelKind::Flat, n, chart, c: R::one(), kappa: R::lit(0.5) })
}

pub fn make_torus_model<R: Real>(n: usize) -> Result<WeinsteinModel<R>> {
    if n == 0 {
        return Err(Error::Config("torus model needs n >= 1".into()));
    }
    let mut names: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    names.extend((1..=n).map(|i| format!("p{i}")));
    names.push("x".into());
    names.push("y".into());
    let mut periodic = vec![true; n];
    periodic.extend(vec![false; n + 2]);
    let chart = ChartSpec::new(&names, &periodic)?;
    Ok(WeinsteinModel { kind: ModelKind::Torus, n, chart, c: R::one(), kappa: R::lit(0.5) })
}

pub fn make_model<R: Real>(kind: ModelKind, n: usize) -> Result<WeinsteinModel<R>> {
    match kind {
        ModelKind::Flat => make_flat_model(n),
        ModelKind::Torus => make_torus_model(n),
    }
}

impl<R: Real> WeinsteinModel<R> {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// The size parameter the model was built with.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Complex dimension of `Ŵ`.
    pub fn complex_dim(&self) -> usize {
        match self.kind {
            ModelKind::Flat => self.n,
            ModelKind::Torus => self.n + 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Real dimension of `F`.
    pub fn f_dim(&self) -> usize {
        self.dim() - 2
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }

    /// Regular value defining `W = {ψ ≤ c}`.
    pub fn c(&self) -> R {
        self.c
    }

    /// `λ = κ·(−dψ∘J)`.
    pub fn kappa(&self) -> R {
        self.kappa
    }

    /// Indices of the stabilizing `ℂ` factor `(x, y)`.
    pub fn fiber(&self) -> (usize, usize) {
        (self.dim() - 2, self.dim() - 1)
    }

    pub fn min_psi_f(&self) -> R {
        R::zero()
    }

    /// A minimum of `ψ_F`, which is also a zero of `Z_F`, in `F` coordinates.
    pub fn q0(&self) -> Vec<R> {
        vec![R::zero(); self.f_dim()]
    }

    pub fn lambda<S: Scalar<Real = R>>(&self, x: &[S], v: &[S]) -> S {
        let (ix, iy) = self.fiber();
        let fiber = x[ix] * v[iy] - x[iy] * v[ix];
        match self.kind {
            ModelKind::Flat => (0..self.n - 1).map(|j| x[2 * j] * v[2 * j + 1] - x[2 * j + 1] * v[2 * j]).sum::<S>() + fiber,
            ModelKind::Torus => (0..self.n).map(|j| x[self.n + j] * v[j]).sum::<S>() + fiber,
        }
    }

    pub fn liouville<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S> {
        let half = R::lit(0.5);
        match self.kind {
            ModelKind::Flat => x.iter().map(|&xi| xi.scale(half)).collect(),
            ModelKind::Torus => {
                let mut z = vec![S::zero(); self.dim()];
                for j in 0..self.n {
                    z[self.n + j] = x[self.n + j];
                }
                let (ix, iy) = self.fiber();
                z[ix] = x[ix].scale(half);
                z[iy] = x[iy].scale(half);
                z
            }
        }
    }

    pub fn psi_f<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        match self.kind {
            ModelKind::Flat => x[..self.f_dim()].iter().map(|&a| a * a).sum(),
            ModelKind::Torus => x[self.n..2 * self.n].iter().map(|&a| a * a).sum(),
        }
    }

    pub fn psi<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        let (ix, iy) = self.fiber();
        self.psi_f(x) + x[ix] * x[ix] + x[iy] * x[iy]
    }

    /// Constant almost complex structure applied to a tangent vector.
    pub fn j_apply<S: Scalar<Real = R>>(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); v.len()];
        let (ix, iy) = self.fiber();
        out[ix] = -v[iy];
        out[iy] = v[ix];
        match self.kind {
            ModelKind::Flat => {
                for j in 0..self.n - 1 {
                    out[2 * j] = -v[2 * j + 1];
                    out[2 * j + 1] = v[2 * j];
                }
            }
            ModelKind::Torus => {
                // J ∂p = ∂q, J ∂q = −∂p
                for j in 0..self.n {
                    out[j] = v[self.n + j];
                    out[self.n + j] = -v[j];
                }
            }
        }
        out
    }

    /// Complex frame `(w_j, J w_j)` of `(TF, J_F)` at `x`, as vectors in `Ŵ`
    /// coordinates. Both built-in frames are constant.
    pub fn trivialization_frame(&self, _x: &[R]) -> Vec<(Vec<R>, Vec<R>)> {
        let m = self.complex_dim() - 1;
        (0..m)
            .map(|j| {
                let mut w = vec![R::zero(); self.dim()];
                w[match self.kind {
                    ModelKind::Flat => 2 * j,
                    ModelKind::Torus => j,
                }] = R::one();
                let jw = self.j_apply(&w);
                (w, jw)
            })
            .collect()
    }

    /// Rotates the stabilizing `ℂ` factor by `angle`.
    pub fn rotate_fiber<S: Scalar<Real = R>>(&self, x: &[S], angle: S) -> Vec<S> {
        let (ix, iy) = self.fiber();
        let (c, s) = (angle.cos(), angle.sin());
        let mut out = x.to_vec();
        out[ix] = c * x[ix] - s * x[iy];
        out[iy] = s * x[ix] + c * x[iy];
        out
    }

    pub fn lambda_form(&self) -> LiouvilleForm<'_, R> {
        LiouvilleForm(self)
    }

    pub fn liouville_field(&self) -> LiouvilleField<'_, R> {
        LiouvilleField(self)
    }

    pub fn exhaustion(&self) -> Exhaustion<'_, R> {
        Exhaustion(self)
    }
}

/// `λ` as a one-form.
pub struct LiouvilleForm<'a, R>(pub &'a WeinsteinModel<R>);

impl<R: Real> OneForm<R> for LiouvilleForm<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S], v: &[S]) -> S {
        self.0.lambda(x, v)
    }
}

/// `Z` as a vector field.
pub struct LiouvilleField<'a, R>(pub &'a WeinsteinModel<R>);

impl<R: Real> VectorField<R> for LiouvilleField<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> Vec<S> {
        self.0.liouville(x)
    }
}

/// `ψ` as a scalar field.
pub struct Exhaustion<'a, R>(pub &'a WeinsteinModel<R>);

impl<R: Real> ScalarField<R> for Exhaustion<'_, R> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<S: Scalar<Real = R>>(&self, x: &[S]) -> S {
        self.0.psi(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let f = make_flat_model::<f64>(1).unwrap();
        assert_eq!((f.dim(), f.f_dim(), f.complex_dim()), (2, 0, 1));
        assert!(f.trivialization_frame(&[0.0, 0.0]).is_empty());
        let t = make_torus_model::<f64>(2).unwrap();
        assert_eq!((t.dim(), t.f_dim(), t.complex_dim()), (6, 4, 3));
        assert!(t.chart().is_periodic(1) && !t.chart().is_periodic(2));
        assert!(make_flat_model::<f64>(0).is_err());
    }

    #[test]
    fn lambda_vanishes_on_liouville_field() {
        for m in [make_flat_model::<f64>(3).unwrap(), make_torus_model(2).unwrap()] {
            let x: Vec<f64> = (0..m.dim()).map(|i| 0.3 * i as f64 - 0.7).collect();
            assert_eq!(m.lambda(&x, &m.liouville(&x)), 0.0);
        }
        let m = make_flat_model::<f64>(2).unwrap();
        assert_eq!(m.lambda(&[1.0, 0.0, 0.0, 0.0], &m.liouville(&[1.0, 0.0, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn torus_frame_is_q_direction_and_its_rotation() {
        let t = make_torus_model::<f64>(1).unwrap();
        let fr = t.trivialization_frame(&[0.0; 4]);
        assert_eq!(fr, vec![(vec![1.0, 0.0, 0.0, 0.0], vec![0.0, -1.0, 0.0, 0.0])]);
    }

    #[test]
    fn half_turn_negates_fiber() {
        let m = make_flat_model::<f64>(1).unwrap();
        let r = m.rotate_fiber(&[0.5, 0.0], std::f64::consts::PI);
        assert!((r[0] + 0.5).abs() < 1e-15 && r[1].abs() < 1e-15);
    }
}
