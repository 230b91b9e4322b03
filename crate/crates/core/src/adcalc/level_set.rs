//! Orthonormal tangent bases of regular level sets.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adcalc::chart::{ChartPoint, TangentVector};
use crate::adcalc::exterior::finite_or_err;
use crate::adcalc::field::ScalarField;
use crate::error::{Error, Result};
use crate::linalg::{det, dot, norm, Mat};
use crate::scalar::Real;

/// Gradients below this norm are treated as critical.
pub const CRITICAL_GRADIENT: f64 = 1e-10;

/// `dim - 1` Euclidean-orthonormal vectors spanning `ker d(field)` at `p`.
///
/// Deterministic: Gram–Schmidt on the unit normal followed by the coordinate
/// vectors in index order, skipping the coordinate most aligned with the
/// normal. The result is oriented so that `(normal, e_1, ..., e_{m})` is a
/// positive frame.
pub fn tangent_basis_of_level_set<R: Real, F: ScalarField<R>>(field: &F, p: &ChartPoint<R>, on_surface_tol: R) -> Result<Vec<TangentVector<R>>> {
    basis_with_seeds(field, p, on_surface_tol, |normal| coordinate_seeds(normal))
}

/// Same span as [`tangent_basis_of_level_set`] but Gram–Schmidt starts from
/// random vectors drawn from `seed`. Used to check that downstream results do
/// not depend on the choice of basis.
pub fn tangent_basis_of_level_set_seeded<R: Real, F: ScalarField<R>>(field: &F, p: &ChartPoint<R>, on_surface_tol: R, seed: u64) -> Result<Vec<TangentVector<R>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    basis_with_seeds(field, p, on_surface_tol, |normal| {
        let n = normal.len();
        (0..n - 1).map(|_| (0..n).map(|_| R::lit(rng.random_range(-1.0..1.0))).collect()).collect()
    })
}

/// Basis as plain component vectors.
pub fn level_set_frame<R: Real, F: ScalarField<R>>(field: &F, p: &ChartPoint<R>, on_surface_tol: R) -> Result<Vec<Vec<R>>> {
    Ok(tangent_basis_of_level_set(field, p, on_surface_tol)?.into_iter().map(|v| v.components().to_vec()).collect())
}

fn coordinate_seeds<R: Real>(normal: &[R]) -> Vec<Vec<R>> {
    let n = normal.len();
    let mut skip = 0;
    for i in 1..n {
        if normal[i].abs() > normal[skip].abs() {
            skip = i;
        }
    }
    (0..n)
        .filter(|&i| i != skip)
        .map(|i| {
            let mut e = vec![R::zero(); n];
            e[i] = R::one();
            e
        })
        .collect()
}

fn basis_with_seeds<R: Real, F: ScalarField<R>>(
    field: &F,
    p: &ChartPoint<R>,
    on_surface_tol: R,
    seeds: impl FnOnce(&[R]) -> Vec<Vec<R>>,
) -> Result<Vec<TangentVector<R>>> {
    if p.dim() != field.dim() {
        return Err(Error::Dimension { expected: field.dim(), found: p.dim() });
    }
    let value = field.value(p.coords());
    finite_or_err(p, &[value], "level-set equation")?;
    if !(value.abs() < on_surface_tol) {
        return Err(Error::OffSurface { value: value.as_f64(), tol: on_surface_tol.as_f64() });
    }
    let grad = field.gradient(p.coords());
    finite_or_err(p, &grad, "level-set gradient")?;
    let gn = norm(&grad);
    if gn < R::lit(CRITICAL_GRADIENT) {
        return Err(Error::CriticalPoint { norm: gn.as_f64() });
    }
    let normal: Vec<R> = grad.iter().map(|&g| g / gn).collect();
    let mut frame: Vec<Vec<R>> = vec![normal.clone()];
    for s in seeds(&normal) {
        let mut v = s;
        // two passes of modified Gram–Schmidt keep orthogonality at roundoff
        for _ in 0..2 {
            for e in &frame {
                let c = dot(&v, e);
                for (vi, &ei) in v.iter_mut().zip(e) {
                    *vi -= c * ei;
                }
            }
        }
        let vn = norm(&v);
        if vn < R::lit(1e-8) {
            return Err(Error::CriticalPoint { norm: vn.as_f64() });
        }
        frame.push(v.into_iter().map(|x| x / vn).collect());
    }
    if det(&Mat::from_columns(&frame)) < R::zero() {
        let last = frame.last_mut().expect("dim >= 2");
        for x in last.iter_mut() {
            *x = -*x;
        }
    }
    frame.into_iter().skip(1).map(|v| TangentVector::new(p, v)).collect()
}
