//! The fiber rotation `Ψ(q, z, s, θ) = (q, e^{iθ} z, s, θ)` and its Gray
//! deformation `Ψ_c = Ψ ∘ ψ_Y¹`.

use crate::adcalc::chart::ChartPoint;
use crate::adcalc::field::MapWithJacobian;
use crate::error::{Error, Result};
use crate::flows::fields::{gray_field, GrayField};
use crate::flows::integrator::{integrate_flow, FlowOptions, FlowResult};
use crate::linalg::Mat;
use crate::scalar::Real;
use crate::weinstein::double::DoubledSpace;

/// Drift beyond this multiple of the surface tolerance is an escape.
pub const ESCAPE_FACTOR: f64 = 10.0;

/// `Ψ(x)` and its Jacobian, including the `∂θ` column.
pub fn psi_rotation<R: Real>(ds: &DoubledSpace<R>, x: &[R]) -> (Vec<R>, Mat<R>) {
    let (ix, iy) = ds.model().fiber();
    let it = ds.theta_index();
    let (c, s) = (x[it].cos(), x[it].sin());
    let (a, b) = (x[ix], x[iy]);
    let mut out = x.to_vec();
    out[ix] = c * a - s * b;
    out[iy] = s * a + c * b;
    let mut j = Mat::identity(x.len());
    j[(ix, ix)] = c;
    j[(ix, iy)] = -s;
    j[(iy, ix)] = s;
    j[(iy, iy)] = c;
    j[(ix, it)] = -s * a - c * b;
    j[(iy, it)] = c * a - s * b;
    (out, j)
}

/// `Ψ` as a map with Jacobian.
pub struct PsiRotation<'a, R>(pub &'a DoubledSpace<R>);

impl<R: Real> MapWithJacobian<R> for PsiRotation<'_, R> {
    fn apply(&self, x: &[R]) -> Result<(Vec<R>, Mat<R>)> {
        let (mut y, j) = psi_rotation(self.0, x);
        self.0.chart().reduce(&mut y);
        Ok((y, j))
    }
}

fn on_surface<R: Real>(ds: &DoubledSpace<R>, x: &[R], tol: R) -> Result<()> {
    let v = ds.f_d(x);
    if v.abs() < tol {
        Ok(())
    } else {
        Err(Error::OffSurface { value: v.as_f64(), tol: tol.as_f64() })
    }
}

/// `Ψ_c^k(p)` with its Jacobian; each factor is one time-1 flow of `Y`
/// followed by `Ψ`.
pub fn psi_c<R: Real>(ds: &DoubledSpace<R>, p: &ChartPoint<R>, k: usize, opts: &FlowOptions<R>, surface_tol: R) -> Result<FlowResult<R>> {
    on_surface(ds, p.coords(), surface_tol)?;
    let y = gray_field(ds);
    psi_c_with(ds, &y, p, k, opts, surface_tol)
}

fn psi_c_with<R: Real>(ds: &DoubledSpace<R>, y: &GrayField<R>, p: &ChartPoint<R>, k: usize, opts: &FlowOptions<R>, surface_tol: R) -> Result<FlowResult<R>> {
    let d = ds.dim();
    let constraint = |x: &[R], _t: R| ds.f_d(x);
    let mut point = p.clone();
    let mut jac = Mat::identity(d);
    let mut drift = ds.f_d(p.coords()).abs();
    let (mut steps, mut rejected) = (0, 0);
    let mut trajectory = Vec::new();
    let limit = R::lit(ESCAPE_FACTOR) * surface_tol;
    for i in 0..k {
        let flow = integrate_flow(y, &point, R::zero(), R::one(), opts, Some(&constraint))?;
        steps += flow.steps;
        rejected += flow.rejected;
        drift = drift.max(flow.drift);
        trajectory.extend(flow.trajectory.into_iter().map(|mut r| {
            r.t += i as f64;
            r
        }));
        if drift > limit {
            return Err(Error::FlowEscape { drift: drift.as_f64(), limit: limit.as_f64() });
        }
        let (mut rotated, jr) = psi_rotation(ds, flow.endpoint.coords());
        ds.chart().reduce(&mut rotated);
        if opts.jacobian {
            jac = jr.mul(&flow.jacobian).mul(&jac);
        }
        drift = drift.max(ds.f_d(&rotated).abs());
        point = ChartPoint::new(ds.chart(), rotated)?;
    }
    if drift > limit {
        return Err(Error::FlowEscape { drift: drift.as_f64(), limit: limit.as_f64() });
    }
    Ok(FlowResult { endpoint: point, jacobian: jac, drift, steps, rejected, tol_used: (opts.tol.rel, opts.tol.abs), trajectory })
}

/// `Ψ_c^k` as a map with Jacobian.
pub struct PsiC<'a, R> {
    pub ds: &'a DoubledSpace<R>,
    pub k: usize,
    pub opts: FlowOptions<R>,
    pub surface_tol: R,
}

impl<R: Real> MapWithJacobian<R> for PsiC<'_, R> {
    fn apply(&self, x: &[R]) -> Result<(Vec<R>, Mat<R>)> {
        let p = ChartPoint::new(self.ds.chart(), x.to_vec())?;
        let r = psi_c(self.ds, &p, self.k, &self.opts, self.surface_tol)?;
        Ok((r.endpoint.coords().to_vec(), r.jacobian))
    }
}
