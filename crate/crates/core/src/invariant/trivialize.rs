//! Stabilization by `Zᴰ` and trivialization `μ` to complex matrices.
//!
//! `μ` sends a real tangent vector of `Ŵ × ℝ × S¹` to `ℂ^{N+1}`:
//! `F` components in the complex frame `(w_j, J w_j)`, the stabilizing
//! factor as `u_x + i u_y`, and `(s, θ)` as `u_s + i u_θ` (since
//! `Jᴰ ∂s = ∂θ`).

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariant::family::LagrangianFamily;
use crate::linalg::{complex_det, singular_values, solve, ComplexExt, Mat};
use crate::scalar::Real;
use crate::weinstein::double::DoubledSpace;

/// Determinants below this modulus count as singular.
pub const SINGULAR_DET: f64 = 1e-10;

/// Minimum singular value of the stabilized real frame.
pub const STABILIZATION_MIN_SV: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopMeta<R> {
    /// Radius of the stabilizing factor at the unpushed base point.
    pub x0: R,
    /// Radius of the stabilizing factor at the pushed base point of sample 0.
    pub r_k: R,
    /// `∂φ` coefficient of the pushed `∂θ`-section at sample 0.
    pub s_k: R,
}

#[derive(Clone, Debug)]
pub struct MatrixLoop<R> {
    pub k: usize,
    pub thetas: Vec<R>,
    pub matrices: Vec<Mat<Complex<R>>>,
    pub meta: LoopMeta<R>,
}

impl<R: Real> MatrixLoop<R> {
    pub fn determinants(&self) -> Vec<Complex<R>> {
        self.matrices.iter().map(complex_det).collect()
    }
}

/// `μ_x(v)`.
pub fn trivialize_vector<R: Real>(ds: &DoubledSpace<R>, x: &[R], v: &[R]) -> Result<Vec<Complex<R>>> {
    let model = ds.model();
    let fd = model.f_dim();
    let mut out = Vec::with_capacity(model.complex_dim() + 1);
    if fd > 0 {
        let frame = model.trivialization_frame(&x[..model.dim()]);
        let cols: Vec<Vec<R>> = frame.iter().flat_map(|(w, jw)| [w[..fd].to_vec(), jw[..fd].to_vec()]).collect();
        let coeffs = solve(&Mat::from_columns(&cols), &v[..fd]).ok_or_else(|| Error::Config("trivialization frame of F is singular".into()))?;
        for pair in coeffs.chunks(2) {
            out.push(Complex::new(pair[0], pair[1]));
        }
    }
    let (ix, iy) = model.fiber();
    out.push(Complex::new(v[ix], v[iy]));
    out.push(Complex::new(v[ds.s_index()], v[ds.theta_index()]));
    Ok(out)
}

fn fiber_polar<R: Real>(ds: &DoubledSpace<R>, x: &[R], v: &[R]) -> (R, R) {
    let (ix, iy) = ds.model().fiber();
    let r2 = x[ix] * x[ix] + x[iy] * x[iy];
    (r2.sqrt(), (x[ix] * v[iy] - x[iy] * v[ix]) / r2)
}

/// Appends `Zᴰ` at each base point and assembles `B(θ)` column by column.
pub fn stabilize_and_trivialize<R: Real>(fam: &LagrangianFamily<R>, ds: &DoubledSpace<R>, k: usize) -> Result<MatrixLoop<R>> {
    let mut matrices = Vec::with_capacity(fam.thetas.len());
    for (i, (p, frame)) in fam.base_points.iter().zip(&fam.sections).enumerate() {
        let x = p.coords();
        let mut cols: Vec<Vec<R>> = frame.clone();
        cols.push(ds.z_d(x));
        let sv = singular_values(&Mat::from_columns(&cols));
        let smin = sv.last().copied().unwrap_or(R::zero());
        if !(smin > R::lit(STABILIZATION_MIN_SV)) {
            return Err(Error::FamilyInvalid { sample: i, what: "Z^D lies in the span of the sections".into(), residual: smin.as_f64() });
        }
        let ccols = cols.iter().map(|v| trivialize_vector(ds, x, v)).collect::<Result<Vec<_>>>()?;
        matrices.push(Mat::from_columns(&ccols));
    }
    let x0 = fam.meta.x0;
    let (r_k, s_k) = match (fam.base_points.first(), fam.sections.first().and_then(|f| f.last())) {
        (Some(p), Some(v)) => fiber_polar(ds, p.coords(), v),
        _ => (R::nan(), R::nan()),
    };
    Ok(MatrixLoop { k, thetas: fam.thetas.clone(), matrices, meta: LoopMeta { x0, r_k, s_k } })
}

/// Index of the first sample whose determinant modulus is at most
/// [`SINGULAR_DET`], with that modulus.
pub fn first_singular<R: Real>(lp: &MatrixLoop<R>) -> Option<(usize, R)> {
    lp.determinants().iter().enumerate().map(|(i, d)| (i, d.cabs())).find(|&(_, m)| !(m > R::lit(SINGULAR_DET)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::family::build_family;
    use crate::weinstein::cutoff::{cutoff_equation, CutoffSpec};
    use crate::weinstein::double::double;
    use crate::weinstein::model::{make_flat_model, make_torus_model};

    #[test]
    fn mu_of_coordinate_vectors() {
        let m = make_torus_model::<f64>(1).unwrap();
        let ds = double(&m, cutoff_equation(&m, CutoffSpec::for_model(&m).unwrap())).unwrap();
        let x = [0.0; 6];
        // ∂p = −J∂q ↦ −i
        let dp = trivialize_vector(&ds, &x, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(dp[0], Complex::new(0.0, -1.0));
        let ds_theta = trivialize_vector(&ds, &x, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(ds_theta[2], Complex::new(0.0, 1.0));
    }

    #[test]
    fn unpushed_loop_structure() {
        // columns: (i·(2/x0²)·x0, i) for the θ-section and (x0/2, −1) for Zᴰ
        let m = make_flat_model::<f64>(1).unwrap();
        let ds = double(&m, cutoff_equation(&m, CutoffSpec::for_model(&m).unwrap())).unwrap();
        let fam = build_family(&ds, 4).unwrap();
        let lp = stabilize_and_trivialize(&fam, &ds, 0).unwrap();
        let b = &lp.matrices[1];
        assert_eq!(b[(0, 0)], Complex::new(0.0, 4.0));
        assert_eq!(b[(1, 0)], Complex::new(0.0, 1.0));
        assert_eq!(b[(0, 1)], Complex::new(0.25, 0.0));
        assert_eq!(b[(1, 1)], Complex::new(-1.0, 0.0));
        assert!((lp.meta.s_k - 8.0).abs() < 1e-15);
        assert_eq!(lp.meta.r_k, 0.5);
        assert!(first_singular(&lp).is_none());
    }
}
