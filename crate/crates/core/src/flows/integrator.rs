//! Adaptive Dormand–Prince 5(4) with simultaneous variational equation
//! `Ṁ = (∂ₓF) M`, `M(t0) = id`.
//!
//! Error control runs over the state and the Jacobian together, so the
//! transported Jacobian is as accurate as the endpoint. Constraint drift is
//! recorded at every accepted step and never projected away.

use std::io::Write;

use serde::Serialize;

use crate::adcalc::chart::ChartPoint;
use crate::adcalc::dual::seed;
use crate::adcalc::field::TimeDependentField;
use crate::error::{Error, Result, TrajectoryRow};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Smallest step magnitude (relative to `max(1, |t|)`) before giving up.
pub const MIN_STEP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances<R> {
    pub rel: R,
    pub abs: R,
}

impl<R: Real> Default for Tolerances<R> {
    fn default() -> Self {
        Tolerances { rel: R::lit(1e-10), abs: R::lit(1e-12) }
    }
}

impl<R: Real> Tolerances<R> {
    pub fn new(rel: R, abs: R) -> Self {
        Tolerances { rel, abs }
    }

    /// Both tolerances divided by `factor`.
    pub fn tightened(&self, factor: R) -> Self {
        Tolerances { rel: self.rel / factor, abs: self.abs / factor }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions<R> {
    pub tol: Tolerances<R>,
    pub jacobian: bool,
    pub max_steps: usize,
}

impl<R: Real> Default for FlowOptions<R> {
    fn default() -> Self {
        FlowOptions { tol: Tolerances::default(), jacobian: true, max_steps: 200_000 }
    }
}

impl<R: Real> FlowOptions<R> {
    pub fn with_tol(tol: Tolerances<R>) -> Self {
        FlowOptions { tol, ..Self::default() }
    }
}

/// A monitored constraint `c(x, t)` that should stay near zero.
pub type Constraint<'a, R> = &'a (dyn Fn(&[R], R) -> R + Sync);

#[derive(Clone, Debug)]
pub struct FlowResult<R> {
    pub endpoint: ChartPoint<R>,
    /// Identity when the Jacobian was not requested.
    pub jacobian: Mat<R>,
    /// Max `|constraint|` over accepted steps; zero without a constraint.
    pub drift: R,
    pub steps: usize,
    pub rejected: usize,
    pub tol_used: (R, R),
    pub trajectory: Vec<TrajectoryRow>,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct System<'a, R, F> {
    field: &'a F,
    p0: &'a ChartPoint<R>,
    dim: usize,
    jacobian: bool,
}

impl<R: Real, F: TimeDependentField<R>> System<'_, R, F> {
    /// Derivative of the stacked state `[x; M columns]`.
    fn rhs(&self, t: R, y: &[R]) -> Result<Vec<R>> {
        let d = self.dim;
        let x = &y[..d];
        self.field.check(x, t)?;
        let mut out = Vec::with_capacity(y.len());
        if self.jacobian && d > 0 {
            let mut cols = Vec::with_capacity(d);
            for j in 0..d {
                let col = &y[d + j * d..d + (j + 1) * d];
                let v = self.field.eval(&seed(x, col), t);
                if j == 0 {
                    out.extend(v.iter().map(|z| z.re));
                }
                cols.push(v);
            }
            for c in cols {
                out.extend(c.iter().map(|z| z.eps));
            }
        } else {
            out.extend(self.field.eval(x, t));
        }
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            let coordinate = if i < d { self.p0.chart().name(i).to_owned() } else { format!("jacobian[{},{}]", (i - d) % d, (i - d) / d) };
            return Err(Error::NonFinite { what: "vector field along flow".into(), coordinate });
        }
        Ok(out)
    }
}

fn error_norm<R: Real>(y: &[R], ynew: &[R], err: &[R], tol: &Tolerances<R>) -> R {
    let mut acc = R::zero();
    for ((&a, &b), &e) in y.iter().zip(ynew).zip(err) {
        let sc = tol.abs + tol.rel * a.abs().max(b.abs());
        let q = e / sc;
        acc += q * q;
    }
    (acc / R::lit(y.len().max(1) as f64)).sqrt()
}

fn rms<R: Real>(v: &[R], y: &[R], tol: &Tolerances<R>) -> R {
    let mut acc = R::zero();
    for (&a, &b) in v.iter().zip(y) {
        let q = a / (tol.abs + tol.rel * b.abs());
        acc += q * q;
    }
    (acc / R::lit(v.len().max(1) as f64)).sqrt()
}

fn axpy<R: Real>(y: &[R], h: R, terms: &[(R, &Vec<R>)]) -> Vec<R> {
    let mut out = y.to_vec();
    for &(c, k) in terms {
        if c.is_zero() {
            continue;
        }
        let hc = h * c;
        for (o, &ki) in out.iter_mut().zip(k.iter()) {
            *o += hc * ki;
        }
    }
    out
}

/// Integrates `ẋ = field(x, t)` from `t0` to `t1` (either direction).
pub fn integrate_flow<R: Real, F: TimeDependentField<R>>(
    field: &F,
    p0: &ChartPoint<R>,
    t0: R,
    t1: R,
    opts: &FlowOptions<R>,
    constraint: Option<Constraint<'_, R>>,
) -> Result<FlowResult<R>> {
    let d = p0.dim();
    if field.dim() != d {
        return Err(Error::Dimension { expected: field.dim(), found: d });
    }
    let sys = System { field, p0, dim: d, jacobian: opts.jacobian };
    let mut y: Vec<R> = p0.coords().to_vec();
    if opts.jacobian {
        let id = Mat::<R>::identity(d);
        for j in 0..d {
            y.extend(id.column(j));
        }
    }
    let cval = |y: &[R], t: R| constraint.map_or(R::zero(), |c| c(&y[..d], t));
    let row = |y: &[R], t: R, c: R| TrajectoryRow { t: t.as_f64(), coords: y[..d].iter().map(|v| v.as_f64()).collect(), constraint: c.abs().as_f64() };

    let mut t = t0;
    let c0 = cval(&y, t);
    let mut drift = c0.abs();
    let mut trajectory = vec![row(&y, t, c0)];
    let (mut steps, mut rejected) = (0usize, 0usize);

    let span = t1 - t0;
    if !span.is_zero() {
        let dir = if span > R::zero() { R::one() } else { -R::one() };
        let mut k1 = sys.rhs(t, &y)?;
        let mut h = initial_step(&sys, t, &y, &k1, dir, span.abs(), &opts.tol)?;
        let mut last_rejected = false;
        loop {
            let remaining = (t1 - t) * dir;
            if remaining <= R::zero() {
                break;
            }
            if steps + rejected >= opts.max_steps {
                return Err(Error::TooManySteps(opts.max_steps));
            }
            let floor = R::lit(MIN_STEP) * R::one().max(t.abs());
            if h < floor {
                return Err(Error::StepUnderflow { t: t.as_f64(), h: h.as_f64(), trajectory });
            }
            let last = h >= remaining;
            let hs = if last { remaining } else { h } * dir;
            let mut k: Vec<Vec<R>> = Vec::with_capacity(7);
            k.push(k1.clone());
            for s in 1..7 {
                let terms: Vec<(R, &Vec<R>)> = (0..s).map(|j| (R::lit(A[s][j]), &k[j])).collect();
                let ys = axpy(&y, hs, &terms);
                let ks = sys.rhs(t + hs * R::lit(C[s]), &ys)?;
                k.push(ks);
            }
            let terms: Vec<(R, &Vec<R>)> = (0..6).map(|j| (R::lit(A[6][j]), &k[j])).collect();
            let ynew = axpy(&y, hs, &terms);
            let err_terms: Vec<(R, &Vec<R>)> = (0..7).map(|j| (R::lit(E[j]), &k[j])).collect();
            let errv = axpy(&vec![R::zero(); y.len()], hs, &err_terms);
            let err = error_norm(&y, &ynew, &errv, &opts.tol);
            if !err.is_finite() {
                return Err(Error::NonFinite { what: "integrator error estimate".into(), coordinate: "step".into() });
            }
            if err <= R::one() {
                t = if last { t1 } else { t + hs };
                y = ynew;
                k1 = k.swap_remove(6);
                steps += 1;
                let c = cval(&y, t);
                drift = drift.max(c.abs());
                trajectory.push(row(&y, t, c));
                let fac = if err.is_zero() { R::lit(5.0) } else { (R::lit(0.9) * err.powf_fifth_root_inv()).min(R::lit(5.0)).max(R::lit(0.2)) };
                let fac = if last_rejected { fac.min(R::one()) } else { fac };
                h *= fac;
                last_rejected = false;
            } else {
                rejected += 1;
                let fac = (R::lit(0.9) * err.powf_fifth_root_inv()).max(R::lit(0.2));
                h *= fac;
                last_rejected = true;
            }
        }
    }

    let jacobian = if opts.jacobian {
        let cols: Vec<Vec<R>> = (0..d).map(|j| y[d + j * d..d + (j + 1) * d].to_vec()).collect();
        Mat::from_columns(&cols)
    } else {
        Mat::identity(d)
    };
    let endpoint = ChartPoint::new(p0.chart(), y[..d].to_vec())?;
    Ok(FlowResult { endpoint, jacobian, drift, steps, rejected, tol_used: (opts.tol.rel, opts.tol.abs), trajectory })
}

trait FifthRoot {
    fn powf_fifth_root_inv(self) -> Self;
}

impl<R: Real> FifthRoot for R {
    /// `x^(-1/5)`.
    fn powf_fifth_root_inv(self) -> Self {
        (-self.ln() / R::lit(5.0)).exp()
    }
}

/// Starting step after Hairer, Nørsett & Wanner, II.4.
fn initial_step<R: Real, F: TimeDependentField<R>>(sys: &System<'_, R, F>, t: R, y: &[R], f0: &[R], dir: R, span: R, tol: &Tolerances<R>) -> Result<R> {
    let d0 = rms(y, y, tol);
    let d1 = rms(f0, y, tol);
    let small = R::lit(1e-5);
    let h0 = if d0 < small || d1 < small { R::lit(1e-6) } else { R::lit(0.01) * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<R> = y.iter().zip(f0).map(|(&a, &b)| a + dir * h0 * b).collect();
    let f1 = sys.rhs(t + dir * h0, &y1)?;
    let df: Vec<R> = f1.iter().zip(f0).map(|(&a, &b)| a - b).collect();
    let d2 = rms(&df, y, tol) / h0;
    let m = d1.max(d2);
    let h1 = if m <= R::lit(1e-15) { (h0 * R::lit(1e-3)).max(R::lit(1e-6)) } else { (R::lit(0.01) / m).powf_fifth_root_inv().recip() };
    Ok((R::lit(100.0) * h0).min(h1).min(span))
}

/// Writes a trajectory dump with columns `t`, one per coordinate, `abs_fD`.
pub fn write_trajectory_csv<W: Write>(out: &mut W, names: &[String], rows: &[TrajectoryRow]) -> std::io::Result<()> {
    write!(out, "t")?;
    for n in names {
        write!(out, ",{n}")?;
    }
    writeln!(out, ",abs_fD")?;
    for r in rows {
        write!(out, "{:e}", r.t)?;
        for c in &r.coords {
            write!(out, ",{c:e}")?;
        }
        writeln!(out, ",{:e}", r.constraint)?;
    }
    Ok(())
}
