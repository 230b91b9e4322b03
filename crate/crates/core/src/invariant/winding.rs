//! Determinant winding number of a matrix loop and the structural residuals
//! of `B_k`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariant::trivialize::MatrixLoop;
use crate::linalg::ComplexExt;
use crate::scalar::Real;

/// Max admissible phase jump between adjacent samples.
pub const MAX_PHASE_JUMP: f64 = std::f64::consts::FRAC_PI_2;

/// Max admissible `|total/2π − winding|`.
pub const WINDING_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindingReport {
    pub k: usize,
    pub winding: i64,
    pub phase_total: f64,
    pub block_residual: f64,
    pub row_modulation_residual: f64,
    pub radial_residual: f64,
}

/// Principal-value phase increments around the closed loop, the last one
/// closing back to the first sample.
pub fn phase_increments<R: Real>(dets: &[Complex<R>]) -> Vec<R> {
    let n = dets.len();
    (0..n)
        .map(|i| {
            let q = dets[(i + 1) % n] / dets[i];
            q.carg()
        })
        .collect()
}

/// `(total phase, largest |increment|)`.
pub fn phase_total<R: Real>(dets: &[Complex<R>]) -> (R, R) {
    phase_increments(dets).into_iter().fold((R::zero(), R::zero()), |(s, m), d| (s + d, m.max(d.abs())))
}

/// Entries required to vanish: rows `N−1, N` (0-based) of the first `N−1`
/// columns of an `(N+1)×(N+1)` matrix.
pub fn block_residual<R: Real>(lp: &MatrixLoop<R>) -> R {
    let mut worst = R::zero();
    for m in &lp.matrices {
        let n = m.rows() - 1;
        for i in [n - 1, n] {
            for j in 0..n - 1 {
                worst = worst.max(m[(i, j)].cabs());
            }
        }
    }
    worst
}

/// Deviation of `B(θ)[N−1][c]·e^{−ikθ}` from its value at the first sample,
/// for the last two columns `c`.
pub fn row_modulation_residual<R: Real>(lp: &MatrixLoop<R>) -> R {
    let Some(first) = lp.matrices.first() else { return R::zero() };
    let n = first.rows() - 1;
    let k = R::lit(lp.k as f64);
    let demod = |m: &crate::linalg::Mat<Complex<R>>, th: R, c: usize| {
        let ang = -(k * th);
        m[(n - 1, c)] * Complex::new(ang.cos(), ang.sin())
    };
    let refs = [demod(first, lp.thetas[0], n - 1), demod(first, lp.thetas[0], n)];
    let mut worst = R::zero();
    for (m, &th) in lp.matrices.iter().zip(&lp.thetas) {
        for (r, c) in refs.iter().zip([n - 1, n]) {
            worst = worst.max((demod(m, th, c) - r).cabs());
        }
    }
    worst
}

/// Max entrywise deviation of the loop from its first matrix.
pub fn loop_constancy<R: Real>(lp: &MatrixLoop<R>) -> R {
    let Some(first) = lp.matrices.first() else { return R::zero() };
    let mut worst = R::zero();
    for m in &lp.matrices {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                worst = worst.max((m[(i, j)] - first[(i, j)]).cabs());
            }
        }
    }
    worst
}

/// `|k + 2/x0² − 2/r_k²|`.
pub fn radial_residual<R: Real>(k: usize, x0: R, r_k: R) -> R {
    let two = R::lit(2.0);
    (R::lit(k as f64) + two / (x0 * x0) - two / (r_k * r_k)).abs()
}

pub fn winding_number<R: Real>(lp: &MatrixLoop<R>) -> Result<WindingReport> {
    let dets = lp.determinants();
    if dets.is_empty() {
        return Err(Error::Undersampled { jump: f64::NAN, samples: 0 });
    }
    let (total, jump) = phase_total(&dets);
    if !(jump < R::lit(MAX_PHASE_JUMP)) {
        return Err(Error::Undersampled { jump: jump.as_f64(), samples: dets.len() });
    }
    let ratio = total.as_f64() / std::f64::consts::TAU;
    let winding = ratio.round();
    if !((ratio - winding).abs() < WINDING_SLACK) {
        return Err(Error::WindingInconsistent { ratio });
    }
    Ok(WindingReport {
        k: lp.k,
        winding: winding as i64,
        phase_total: total.as_f64(),
        block_residual: block_residual(lp).as_f64(),
        row_modulation_residual: row_modulation_residual(lp).as_f64(),
        radial_residual: radial_residual(lp.k, lp.meta.x0, lp.meta.r_k).as_f64(),
    })
}
