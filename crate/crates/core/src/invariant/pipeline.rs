//! Family → pushforward → trivialization → winding, with adaptive doubling of
//! the θ grid.

use serde::Serialize;

use crate::adcalc::chart::ChartPoint;
use crate::error::{Error, Result};
use crate::flows::integrator::FlowOptions;
use crate::flows::psi::psi_c;
use crate::invariant::family::{build_family, pushforward_family, FamilyResiduals, FamilyTolerances, validate_family};
use crate::linalg::ComplexExt;
use crate::invariant::trivialize::{first_singular, stabilize_and_trivialize, MatrixLoop};
use crate::invariant::winding::{phase_total, radial_residual, winding_number, WindingReport, MAX_PHASE_JUMP};
use crate::scalar::Real;
use crate::weinstein::double::DoubledSpace;

pub const DEFAULT_THETA_SAMPLES: usize = 64;
pub const MAX_THETA_SAMPLES: usize = 4096;

#[derive(Clone, Debug)]
pub struct InvariantOptions<R> {
    pub theta_samples: usize,
    pub max_theta_samples: usize,
    pub flow: FlowOptions<R>,
    pub surface_tol: R,
}

impl<R: Real> Default for InvariantOptions<R> {
    fn default() -> Self {
        InvariantOptions {
            theta_samples: DEFAULT_THETA_SAMPLES,
            max_theta_samples: MAX_THETA_SAMPLES,
            flow: FlowOptions::default(),
            surface_tol: R::lit(1e-8),
        }
    }
}

/// Everything measured for one iterate.
#[derive(Clone, Debug)]
pub struct InvariantRun<R> {
    pub report: WindingReport,
    pub matrix_loop: MatrixLoop<R>,
    pub residuals: FamilyResiduals<R>,
    /// Grid size the loop was accepted at.
    pub samples: usize,
}

/// Per-iterate extras recorded next to the [`WindingReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopSummary {
    pub samples: usize,
    pub x0: f64,
    pub r_k: f64,
    pub s_k: f64,
    /// `|s_k − (k + 2/x0²)|`.
    pub s_k_residual: f64,
    pub loop_constancy: f64,
    pub min_abs_det: f64,
}

impl<R: Real> InvariantRun<R> {
    pub fn summary(&self) -> LoopSummary {
        let m = &self.matrix_loop.meta;
        let x0 = m.x0.as_f64();
        let predicted = self.report.k as f64 + 2.0 / (x0 * x0);
        let min_abs_det = self.matrix_loop.determinants().iter().map(|d| d.cabs().as_f64()).fold(f64::INFINITY, f64::min);
        LoopSummary {
            samples: self.samples,
            x0,
            r_k: m.r_k.as_f64(),
            s_k: m.s_k.as_f64(),
            s_k_residual: (m.s_k.as_f64() - predicted).abs(),
            loop_constancy: crate::invariant::winding::loop_constancy(&self.matrix_loop).as_f64(),
            min_abs_det,
        }
    }
}

fn attempt<R: Real>(ds: &DoubledSpace<R>, k: usize, samples: usize, opts: &InvariantOptions<R>) -> Result<(MatrixLoop<R>, FamilyResiduals<R>)> {
    let fam = build_family(ds, samples)?;
    let pushed = pushforward_family(&fam, ds, k, &opts.flow, opts.surface_tol)?;
    let residuals = validate_family(&pushed, ds, &FamilyTolerances::transported())?;
    Ok((stabilize_and_trivialize(&pushed, ds, k)?, residuals))
}

/// Runs the pipeline for `Ψ_c^k`, doubling the θ grid while a determinant
/// is singular or an adjacent phase jump reaches π/2.
pub fn run_invariant<R: Real>(ds: &DoubledSpace<R>, k: usize, opts: &InvariantOptions<R>) -> Result<InvariantRun<R>> {
    if opts.theta_samples == 0 {
        return Err(Error::Config("theta samples must be positive".into()));
    }
    let mut samples = opts.theta_samples;
    loop {
        let (lp, residuals) = attempt(ds, k, samples, opts)?;
        let singular = first_singular(&lp);
        let (_, jump) = phase_total(&lp.determinants());
        let resolved = singular.is_none() && jump < R::lit(MAX_PHASE_JUMP);
        if resolved || samples * 2 > opts.max_theta_samples {
            if let Some((sample, det)) = singular {
                return Err(Error::SingularMatrix { sample, det: det.as_f64() });
            }
            let report = winding_number(&lp)?;
            return Ok(InvariantRun { report, matrix_loop: lp, residuals, samples });
        }
        samples *= 2;
    }
}

/// `|k + 2/x0² − 2/r_k²|` with `r_k` the fiber radius of `Ψ_c^k(γ(0))`.
pub fn radial_constraint_check<R: Real>(ds: &DoubledSpace<R>, k: usize, flow: &FlowOptions<R>, surface_tol: R) -> Result<R> {
    let fam = build_family(ds, 1)?;
    let x0 = fam.meta.x0;
    if k == 0 {
        return Ok(radial_residual(0, x0, x0));
    }
    let opts = FlowOptions { jacobian: false, ..*flow };
    let end: ChartPoint<R> = psi_c(ds, &fam.base_points[0], k, &opts, surface_tol)?.endpoint;
    let (ix, iy) = ds.model().fiber();
    let x = end.coords();
    let r_k = (x[ix] * x[ix] + x[iy] * x[iy]).sqrt();
    Ok(radial_residual(k, x0, r_k))
}
