//! Loops of Lagrangian frames in the contact planes of `{fᴰ = 0}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::adcalc::chart::ChartPoint;
use crate::adcalc::field::{d_oneform_generic, OneForm, ScalarField};
use crate::error::{Error, Result};
use crate::flows::integrator::FlowOptions;
use crate::flows::psi::psi_c;
use crate::linalg::{singular_values, Mat};
use crate::scalar::Real;
use crate::weinstein::cutoff::EquationKind;
use crate::weinstein::double::DoubledSpace;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyTolerances<R> {
    /// `|α(X_j)|` and `|dfᴰ(X_j)|`.
    pub alpha: R,
    /// Smallest singular value of the frame.
    pub independence: R,
    /// `|dα(X_i, X_j)|`.
    pub lagrangian: R,
}

impl<R: Real> FamilyTolerances<R> {
    /// Tolerances for a freshly built family.
    pub fn construction() -> Self {
        FamilyTolerances { alpha: R::lit(1e-8), independence: R::lit(1e-6), lagrangian: R::lit(1e-7) }
    }

    /// Tolerances after a pushforward through numerically integrated flows.
    pub fn transported() -> Self {
        FamilyTolerances { alpha: R::lit(1e-7), independence: R::lit(1e-6), lagrangian: R::lit(1e-7) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyMeta<R> {
    pub q0: Vec<R>,
    pub x0: R,
    pub a: R,
    pub c: R,
}

#[derive(Clone, Debug)]
pub struct LagrangianFamily<R> {
    pub thetas: Vec<R>,
    pub base_points: Vec<ChartPoint<R>>,
    /// `sections[i]` holds the frame at sample `i`.
    pub sections: Vec<Vec<Vec<R>>>,
    pub meta: FamilyMeta<R>,
}

/// Worst residuals over all samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct FamilyResiduals<R> {
    pub alpha: R,
    pub tangency: R,
    pub min_singular_value: R,
    pub lagrangian: R,
}

/// Equally spaced angles `2πi/samples`.
pub fn theta_grid<R: Real>(samples: usize) -> Vec<R> {
    (0..samples).map(|i| R::two_pi() * R::lit(i as f64) / R::lit(samples as f64)).collect()
}

/// `γ(θ) = (q0, x0, −1, θ)` with sections `w_j(q0)` and `∂θ + (2/x0) ∂y`,
/// where `x0 = √(c − 3a − ψ_F(q0))`.
pub fn build_family<R: Real>(ds: &DoubledSpace<R>, samples: usize) -> Result<LagrangianFamily<R>> {
    let model = ds.model();
    let a = match ds.equation().kind() {
        EquationKind::Cutoff(spec) => spec.a(),
        EquationKind::Shifted => return Err(Error::Config("the invariant pipeline needs the cutoff regular equation".into())),
    };
    if samples == 0 {
        return Err(Error::Config("theta samples must be positive".into()));
    }
    let q0 = model.q0();
    let mut w0 = q0.clone();
    w0.extend([R::zero(), R::zero()]);
    let psi_f = model.psi_f(&w0);
    let c = model.c();
    let x0sq = c - R::lit(3.0) * a - psi_f;
    if !(x0sq > R::zero()) {
        return Err(Error::Config(format!("c - 3a = {} does not exceed min psi_F", (c - R::lit(3.0) * a).as_f64())));
    }
    let x0 = x0sq.sqrt();
    let (ix, iy) = model.fiber();
    let d = ds.dim();
    let thetas = theta_grid::<R>(samples);
    let mut frame_f: Vec<Vec<R>> = Vec::new();
    for (w, _) in model.trivialization_frame(&w0) {
        let mut v = w;
        v.extend([R::zero(), R::zero()]);
        frame_f.push(v);
    }
    let mut last = vec![R::zero(); d];
    last[ds.theta_index()] = R::one();
    last[iy] = R::lit(2.0) / x0;
    let mut base_points = Vec::with_capacity(samples);
    let mut sections = Vec::with_capacity(samples);
    for &th in &thetas {
        let mut x = vec![R::zero(); d];
        x[..q0.len()].copy_from_slice(&q0);
        x[ix] = x0;
        x[ds.s_index()] = -R::one();
        x[ds.theta_index()] = th;
        base_points.push(ChartPoint::new(ds.chart(), x)?);
        let mut fr = frame_f.clone();
        fr.push(last.clone());
        sections.push(fr);
    }
    let fam = LagrangianFamily { thetas, base_points, sections, meta: FamilyMeta { q0, x0, a, c } };
    validate_family(&fam, ds, &FamilyTolerances::construction())?;
    Ok(fam)
}

/// Checks ξ-membership, independence and the Lagrangian condition at every
/// sample; returns the worst residuals.
pub fn validate_family<R: Real>(fam: &LagrangianFamily<R>, ds: &DoubledSpace<R>, tol: &FamilyTolerances<R>) -> Result<FamilyResiduals<R>> {
    let alpha = ds.lambda_d_form();
    let fd = ds.f_d_field();
    let mut worst = FamilyResiduals { min_singular_value: R::infinity(), ..FamilyResiduals::default() };
    for (i, (p, frame)) in fam.base_points.iter().zip(&fam.sections).enumerate() {
        let x = p.coords();
        let fail = |what: &str, residual: R| Error::FamilyInvalid { sample: i, what: what.into(), residual: residual.as_f64() };
        for v in frame {
            let av = alpha.apply(x, v).abs();
            let tv = fd.directional(x, v).abs();
            worst.alpha = worst.alpha.max(av);
            worst.tangency = worst.tangency.max(tv);
            if !(av < tol.alpha) {
                return Err(fail("section not in ker alpha", av));
            }
            if !(tv < tol.alpha) {
                return Err(fail("section not tangent to the surface", tv));
            }
        }
        let sv = singular_values(&Mat::from_columns(frame));
        let smin = sv.last().copied().unwrap_or(R::zero());
        worst.min_singular_value = worst.min_singular_value.min(smin);
        if !(smin > tol.independence) {
            return Err(fail("sections linearly dependent", smin));
        }
        for a in 0..frame.len() {
            for b in a + 1..frame.len() {
                let w = d_oneform_generic(&alpha, x, &frame[a], &frame[b]).abs();
                worst.lagrangian = worst.lagrangian.max(w);
                if !(w < tol.lagrangian) {
                    return Err(fail("sections not isotropic", w));
                }
            }
        }
    }
    Ok(worst)
}

/// `(Ψ_c^k)_* fam`; per-sample flows run in parallel, results keep sample order.
pub fn pushforward_family<R: Real>(
    fam: &LagrangianFamily<R>,
    ds: &DoubledSpace<R>,
    k: usize,
    opts: &FlowOptions<R>,
    surface_tol: R,
) -> Result<LagrangianFamily<R>> {
    if k == 0 {
        return Ok(fam.clone());
    }
    let mapped: Vec<(ChartPoint<R>, Vec<Vec<R>>)> = fam
        .base_points
        .par_iter()
        .zip(fam.sections.par_iter())
        .map(|(p, frame)| {
            let r = psi_c(ds, p, k, opts, surface_tol)?;
            let pushed = frame.iter().map(|v| r.jacobian.mul_vec(v)).collect();
            Ok((r.endpoint, pushed))
        })
        .collect::<Result<_>>()?;
    let (base_points, sections) = mapped.into_iter().unzip();
    let out = LagrangianFamily { thetas: fam.thetas.clone(), base_points, sections, meta: fam.meta.clone() };
    validate_family(&out, ds, &FamilyTolerances::transported())?;
    Ok(out)
}
