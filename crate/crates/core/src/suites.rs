//! Sampled verification suites shared by the command line and the
//! acceptance harness.
//!
//! Every suite draws its points from a generator seeded by `(seed, suite)`,
//! evaluates them in parallel, and folds the results in sample order, so a
//! record depends only on its configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adcalc::chart::{ChartPoint, TangentVector};
use crate::adcalc::exterior::lie_derivative_oneform;
use crate::adcalc::field::{AtTime, OneForm, ScalarField, TimeDependentField};
use crate::error::{Error, Result};
use crate::flows::conformal::conformality_between;
use crate::flows::equivalence::{double_equivalence_flow, DoubleEquivMap};
use crate::flows::fields::{double_equiv_field, gray_field};
use crate::flows::integrator::FlowOptions;
use crate::flows::psi::{psi_rotation, PsiC, PsiRotation};
use crate::invariant::family::FamilyResiduals;
use crate::invariant::pipeline::{radial_constraint_check, run_invariant, InvariantOptions, InvariantRun, LoopSummary};
use crate::invariant::winding::WindingReport;
use crate::linalg::norm;
use crate::weinstein::checks::{almost_stein_check, contact_volume_check, h_homogeneity_residual, j_squared_residual_doubled, liouville_residual, taming_value};
use crate::weinstein::cutoff::RegularEquation;
use crate::weinstein::double::DoubledSpace;
use crate::weinstein::sampling::{random_vector, sample_ambient_point, sample_model_point, sample_surface_points};

/// Conformality residual accepted for the flowed maps.
pub const CONFORMAL_TOL: f64 = 1e-6;
/// Landing and commutation residual accepted for the double equivalence.
pub const EQUIVALENCE_TOL: f64 = 1e-8;
/// Points used by the contact-volume suite at least.
pub const CONTACT_VOLUME_MIN_SAMPLES: usize = 1000;
/// Smallest admissible `min |vol| / median |vol|`.
pub const CONTACT_VOLUME_RATIO: f64 = 1e-8;
/// Factor by which the undeformed `Ψ` must miss [`CONFORMAL_TOL`].
pub const CONTRAST_FACTOR: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// `ι_Z dλ = λ` on `Ŵ` and `ι_{Zᴰ} dλ_t = λ_t` on the doubled chart.
    Liouville,
    /// `L_{X_t} λᴰ = (f1 − f0)/df_tᴰ(Zᴰ) · λᴰ`.
    LieDerivative,
    /// `dh(Zᴰ) = h`.
    HHomogeneity,
    /// `dfᴰ(Y) = 0` and `λ_t(Y) = 0`.
    GrayKernel,
    /// `λ = −κ d^ℂψ`.
    AlmostStein,
    /// `Jᴰ² = −1`.
    JSquared,
    /// `dλ(u, Ju) > 0`.
    Taming,
    /// `dfᴰ(Zᴰ) > 0` on the surface.
    Transversality,
    /// `α ∧ (dα)^n` nonzero with one sign on the surface.
    ContactVolume,
    /// `Ψ_c` is conformal on contact planes with positive factor.
    GrayConformality,
    /// The undeformed `Ψ` is visibly not conformal.
    GrayContrast,
    /// The `X_t` flow lands on `{f0ᴰ = 0}`.
    Landing,
    /// The `X_t` flow is conformal between the two contact structures.
    EquivalenceConformality,
    /// The `X_t` flow commutes with `Ψ`.
    Commutation,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Liouville,
        Suite::LieDerivative,
        Suite::HHomogeneity,
        Suite::GrayKernel,
        Suite::AlmostStein,
        Suite::JSquared,
        Suite::Taming,
        Suite::Transversality,
        Suite::ContactVolume,
        Suite::GrayConformality,
        Suite::GrayContrast,
        Suite::Landing,
        Suite::EquivalenceConformality,
        Suite::Commutation,
    ];

    /// Suites of the `verify` command.
    pub const VERIFY: [Suite; 11] = [
        Suite::Liouville,
        Suite::LieDerivative,
        Suite::HHomogeneity,
        Suite::GrayKernel,
        Suite::AlmostStein,
        Suite::JSquared,
        Suite::Taming,
        Suite::Transversality,
        Suite::ContactVolume,
        Suite::GrayConformality,
        Suite::GrayContrast,
    ];

    /// Suites of the `double-equiv` command.
    pub const DOUBLE_EQUIV: [Suite; 3] = [Suite::Landing, Suite::EquivalenceConformality, Suite::Commutation];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Liouville => "liouville",
            Suite::LieDerivative => "lie-derivative",
            Suite::HHomogeneity => "h-homogeneity",
            Suite::GrayKernel => "gray-kernel",
            Suite::AlmostStein => "almost-stein",
            Suite::JSquared => "j-squared",
            Suite::Taming => "taming",
            Suite::Transversality => "transversality",
            Suite::ContactVolume => "contact-volume",
            Suite::GrayConformality => "gray-conformality",
            Suite::GrayContrast => "gray-contrast",
            Suite::Landing => "landing",
            Suite::EquivalenceConformality => "equivalence-conformality",
            Suite::Commutation => "commutation",
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'; known: {}", Suite::ALL.map(|x| x.name()).join(", "))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one suite. `max_residual` is compared against `threshold`
/// with a strict `<`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub samples: usize,
    pub max_residual: f64,
    pub threshold: f64,
    /// First failing point in sample order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug)]
pub struct SuiteContext {
    pub ds: DoubledSpace<f64>,
    /// Source equation `f0` of the double equivalence; the target `f1` is
    /// the equation of `ds`.
    pub f0: RegularEquation<f64>,
    pub samples: usize,
    pub seed: u64,
    pub flow: FlowOptions<f64>,
    pub surface_tol: f64,
    /// Threshold of the pointwise identities.
    pub identity_tol: f64,
}

impl SuiteContext {
    pub fn new(ds: DoubledSpace<f64>) -> Self {
        let f0 = RegularEquation::shifted(ds.model());
        SuiteContext { ds, f0, samples: 100, seed: 0, flow: FlowOptions::default(), surface_tol: 1e-8, identity_tol: 1e-8 }
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ suite.index().wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// Pointwise outcome: a residual, or an error that fails the sample.
type Sample = Result<f64>;

fn fold(suite: Suite, points: &[Vec<f64>], results: Vec<Sample>, threshold: f64) -> CheckRecord {
    let mut max_residual = if points.is_empty() { 0.0 } else { f64::NEG_INFINITY };
    let mut witness = None;
    let mut error = None;
    for (x, r) in points.iter().zip(results) {
        match r {
            Ok(v) => {
                max_residual = max_residual.max(if v.is_nan() { f64::INFINITY } else { v });
                if !(v < threshold) && witness.is_none() {
                    witness = Some(x.clone());
                }
            }
            Err(e) => {
                max_residual = f64::INFINITY;
                if witness.is_none() {
                    witness = Some(x.clone());
                }
                if error.is_none() {
                    error = Some(e.to_string());
                }
            }
        }
    }
    let status = if witness.is_none() { Status::Pass } else { Status::Fail };
    CheckRecord { name: suite.name().into(), status, samples: points.len(), max_residual, threshold, witness, error, metrics: BTreeMap::new() }
}

fn run_points<F>(suite: Suite, points: Vec<Vec<f64>>, threshold: f64, f: F) -> CheckRecord
where
    F: Fn(usize, &[f64]) -> Sample + Sync,
{
    let results: Vec<Sample> = points.par_iter().enumerate().map(|(i, x)| f(i, x)).collect();
    fold(suite, &points, results, threshold)
}

/// Relative deviation `|a − b| / max(1, |b|)`.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Per-sample extras drawn before the parallel section so that they do not
/// depend on scheduling.
fn extras(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<(f64, Vec<f64>)> {
    (0..count).map(|_| (rng.random_range(0.0..=1.0), random_vector(dim, rng))).collect()
}

pub fn run_suite(suite: Suite, ctx: &SuiteContext) -> CheckRecord {
    let ds = &ctx.ds;
    let mut rng = ctx.rng(suite);
    let n = ctx.samples;
    let tol = ctx.identity_tol;
    match suite {
        Suite::Liouville => {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| sample_ambient_point(ds, &mut rng)).collect();
            let ts = extras(&mut rng, n, 0);
            let model = ds.model();
            run_points(suite, pts, tol, |i, x| {
                let w = &x[..model.dim()];
                let base = liouville_residual(&model.lambda_form(), &model.liouville_field(), w);
                let doubled = liouville_residual(&ds.lambda_t_form(ts[i].0), &ds.z_d_field(), x);
                Ok(base.max(doubled))
            })
        }
        Suite::LieDerivative => {
            let pts = sample_surface_points(ds, n, &mut rng);
            let ex = extras(&mut rng, n, ds.dim());
            let field = double_equiv_field(&ctx.f0, ds.equation(), ds);
            let alpha = ds.lambda_d_form();
            run_points(suite, pts, tol, |i, x| {
                let (t, u) = &ex[i];
                let p = ChartPoint::new(ds.chart(), x.to_vec())?;
                field.check(x, *t)?;
                let lhs = lie_derivative_oneform(&alpha, &AtTime { field: &field, t: *t }, &p, &TangentVector::new(&p, u.clone())?)?;
                let rhs = field.coefficient(x, *t) * alpha.apply(x, u);
                Ok(rel(lhs, rhs))
            })
        }
        Suite::HHomogeneity => {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| sample_ambient_point(ds, &mut rng)).collect();
            run_points(suite, pts, tol, |_, x| Ok(h_homogeneity_residual(ds, x) / ds.h(x).abs().max(1.0)))
        }
        Suite::GrayKernel => {
            let pts = sample_surface_points(ds, n, &mut rng);
            let ts = extras(&mut rng, n, 0);
            let y = gray_field(ds);
            let fd = ds.f_d_field();
            run_points(suite, pts, tol, |i, x| {
                y.check(x, 0.0)?;
                let v = y.value(x);
                let tangency = fd.directional(x, &v).abs();
                let kernel = ds.lambda_t(x, &v, ts[i].0).abs();
                Ok(tangency.max(kernel) / norm(&v).max(1.0))
            })
        }
        Suite::AlmostStein => {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| sample_model_point(ds.model(), &mut rng)).collect();
            run_points(suite, pts, tol, |_, x| Ok(almost_stein_check(ds.model(), x)))
        }
        Suite::JSquared => {
            let residual = j_squared_residual_doubled(ds);
            let pts = vec![Vec::new()];
            run_points(suite, pts, tol, |_, _| Ok(residual))
        }
        Suite::Taming => {
            let model = ds.model();
            let pts: Vec<Vec<f64>> = (0..n).map(|_| sample_model_point(model, &mut rng)).collect();
            let ex = extras(&mut rng, n, model.dim());
            let mut rec = run_points(suite, pts, 0.0, |i, x| {
                let u = &ex[i].1;
                Ok(-taming_value(model, x, u) / norm(u).powi(2))
            });
            rec.metrics.insert("min_taming_ratio".into(), -rec.max_residual);
            rec
        }
        Suite::Transversality => {
            let pts = sample_surface_points(ds, n, &mut rng);
            let mut rec = run_points(suite, pts, 0.0, |_, x| Ok(-ds.transversality(x)));
            rec.metrics.insert("min_value".into(), -rec.max_residual);
            rec
        }
        Suite::ContactVolume => contact_volume_suite(ctx, &mut rng),
        Suite::GrayConformality => {
            let pts = sample_surface_points(ds, n, &mut rng);
            let map = PsiC { ds, k: 1, opts: ctx.flow, surface_tol: ctx.surface_tol };
            let factors: Vec<Result<(f64, f64)>> = pts
                .par_iter()
                .map(|x| {
                    let p = ChartPoint::new(ds.chart(), x.clone())?;
                    let c = conformality_between(&map, ds, ds, &p, ctx.surface_tol, None)?;
                    Ok((c.residual, c.factor))
                })
                .collect();
            let min_factor = factors.iter().filter_map(|r| r.as_ref().ok().map(|c| c.1)).fold(f64::INFINITY, f64::min);
            let mut rec = fold(suite, &pts, factors.into_iter().map(|r| r.map(|c| c.0)).collect(), CONFORMAL_TOL);
            rec.metrics.insert("min_factor".into(), min_factor);
            rec
        }
        Suite::GrayContrast => {
            // same points as the conformality suite
            let mut rng = ctx.rng(Suite::GrayConformality);
            let pts = sample_surface_points(ds, n, &mut rng);
            let map = PsiRotation(ds);
            let residuals: Vec<f64> = pts
                .par_iter()
                .map(|x| {
                    let p = ChartPoint::new(ds.chart(), x.clone()).ok();
                    match p.map(|p| conformality_between(&map, ds, ds, &p, ctx.surface_tol, None)) {
                        Some(Ok(c)) => c.residual,
                        // a reversed coorientation is as far from conformal as it gets
                        Some(Err(Error::CoorientationReversal { .. })) => 1.0,
                        _ => f64::NAN,
                    }
                })
                .collect();
            let worst = residuals.iter().copied().fold(0.0, f64::max);
            let required = CONTRAST_FACTOR * CONFORMAL_TOL;
            let status = if worst >= required { Status::Pass } else { Status::Fail };
            let mut metrics = BTreeMap::new();
            metrics.insert("undeformed_max_residual".into(), worst);
            // residual of the contrast: how far below the required miss the undeformed map stays
            CheckRecord {
                name: suite.name().into(),
                status,
                samples: pts.len(),
                max_residual: required / worst.max(f64::MIN_POSITIVE),
                threshold: 1.0,
                witness: None,
                error: None,
                metrics,
            }
        }
        Suite::Landing | Suite::EquivalenceConformality | Suite::Commutation => equivalence_suite(suite, ctx, &mut rng),
    }
}

fn contact_volume_suite(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> CheckRecord {
    let ds = &ctx.ds;
    let count = ctx.samples.max(CONTACT_VOLUME_MIN_SAMPLES);
    let pts = sample_surface_points(ds, count, rng);
    let values: Vec<Result<f64>> = pts
        .par_iter()
        .map(|x| {
            let p = ChartPoint::new(ds.chart(), x.clone())?;
            contact_volume_check(ds, &p, ctx.surface_tol)
        })
        .collect();
    let ok: Vec<f64> = values.iter().filter_map(|v| v.as_ref().ok().copied()).collect();
    let mut abs: Vec<f64> = ok.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let median = abs.get(abs.len() / 2).copied().unwrap_or(0.0);
    let sign = ok.first().map_or(1.0, |v| v.signum());
    let min_abs = abs.first().copied().unwrap_or(0.0);
    // per point: median/|v|, infinite on a sign flip
    let residuals: Vec<Result<f64>> = values
        .into_iter()
        .map(|r| r.map(|v| if v.signum() == sign && v != 0.0 { median / v.abs() } else { f64::INFINITY }))
        .collect();
    let mut rec = fold(Suite::ContactVolume, &pts, residuals, 1.0 / CONTACT_VOLUME_RATIO);
    rec.metrics.insert("min_abs".into(), min_abs);
    rec.metrics.insert("median_abs".into(), median);
    rec.metrics.insert("min_over_median".into(), if median > 0.0 { min_abs / median } else { 0.0 });
    rec.metrics.insert("sign".into(), sign);
    rec
}

fn equivalence_suite(suite: Suite, ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> CheckRecord {
    let ds = &ctx.ds;
    let pts = sample_surface_points(ds, ctx.samples, rng);
    let field = double_equiv_field(&ctx.f0, ds.equation(), ds);
    let target = ds.with_equation(ctx.f0.clone());
    let position_only = FlowOptions { jacobian: false, ..ctx.flow };
    match suite {
        Suite::Landing => run_points(suite, pts, EQUIVALENCE_TOL, |_, x| {
            let p = ChartPoint::new(ds.chart(), x.to_vec())?;
            let r = double_equivalence_flow(&field, &p, &position_only)?;
            Ok(target.f_d(r.endpoint.coords()).abs())
        }),
        Suite::EquivalenceConformality => {
            let map = DoubleEquivMap { field: &field, opts: ctx.flow };
            // a flow that does not move (f0 = f1) is trivially conformal
            run_points(suite, pts, CONFORMAL_TOL, |_, x| {
                let p = ChartPoint::new(ds.chart(), x.to_vec())?;
                let c = conformality_between(&map, ds, &target, &p, ctx.surface_tol, None)?;
                Ok(c.residual)
            })
        }
        _ => run_points(suite, pts, EQUIVALENCE_TOL, |_, x| {
            let p = ChartPoint::new(ds.chart(), x.to_vec())?;
            let flowed = double_equivalence_flow(&field, &p, &position_only)?;
            let (mut a, _) = psi_rotation(ds, flowed.endpoint.coords());
            ds.chart().reduce(&mut a);
            let (rotated, _) = psi_rotation(ds, x);
            let q = ChartPoint::new(ds.chart(), rotated)?;
            let b = double_equivalence_flow(&field, &q, &position_only)?;
            Ok(norm(&ds.chart().difference(&a, b.endpoint.coords())))
        }),
    }
}

/// Block, row-modulation, radial and `s_k` residuals accepted for `B_k`.
pub const STRUCTURE_TOL: f64 = 1e-6;
/// Entrywise spread accepted for the unpushed loop `B_0`.
pub const CONSTANCY_TOL: f64 = 1e-8;

/// Outcome of the invariant pipeline for one iterate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterateRecord {
    pub k: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<WindingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<LoopSummary>,
    /// Radial residual of a position-only flow from the first base point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial_flow_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyResiduals<f64>>,
    /// Conditions that did not hold.
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IterateRecord {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Runs the pipeline for `Ψ_c^k` and checks winding, block structure,
/// radial constraint and (for `k = 0`) constancy. The run is returned for
/// output when the pipeline itself succeeded.
pub fn run_iterate(ds: &DoubledSpace<f64>, k: usize, opts: &InvariantOptions<f64>) -> (IterateRecord, Option<InvariantRun<f64>>) {
    let mut rec = IterateRecord { k, status: Status::Fail, winding: None, summary: None, radial_flow_residual: None, family: None, failures: Vec::new(), error: None };
    let run = match run_invariant(ds, k, opts) {
        Ok(r) => r,
        Err(e) => {
            rec.error = Some(e.to_string());
            return (rec, None);
        }
    };
    let summary = run.summary();
    let w = &run.report;
    let mut fail = |cond: bool, what: String| {
        if !cond {
            rec.failures.push(what);
        }
    };
    fail(w.winding == k as i64, format!("winding {} != {k}", w.winding));
    fail(w.block_residual < STRUCTURE_TOL, format!("block residual {:e}", w.block_residual));
    fail(w.row_modulation_residual < STRUCTURE_TOL, format!("row modulation residual {:e}", w.row_modulation_residual));
    fail(w.radial_residual < STRUCTURE_TOL, format!("radial residual {:e}", w.radial_residual));
    fail(summary.s_k_residual < STRUCTURE_TOL, format!("s_k residual {:e}", summary.s_k_residual));
    if k == 0 {
        fail(summary.loop_constancy < CONSTANCY_TOL, format!("loop constancy {:e}", summary.loop_constancy));
    }
    match radial_constraint_check(ds, k, &opts.flow, opts.surface_tol) {
        Ok(r) => {
            fail(r < STRUCTURE_TOL, format!("radial flow residual {r:e}"));
            rec.radial_flow_residual = Some(r);
        }
        Err(e) => rec.failures.push(format!("radial flow: {e}")),
    }
    rec.status = if rec.failures.is_empty() { Status::Pass } else { Status::Fail };
    rec.winding = Some(run.report.clone());
    rec.summary = Some(summary);
    rec.family = Some(run.residuals);
    (rec, Some(run))
}

/// Runs `suites` in the given order.
pub fn run_suites(suites: &[Suite], ctx: &SuiteContext) -> Vec<CheckRecord> {
    suites.iter().map(|&s| run_suite(s, ctx)).collect()
}
