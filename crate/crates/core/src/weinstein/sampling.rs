//! Seeded random sample points for the pointwise checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;
use crate::weinstein::double::DoubledSpace;
use crate::weinstein::model::{ModelKind, WeinsteinModel};

/// Half-width of the box non-periodic coordinates are drawn from.
pub const AMBIENT_BOX: f64 = 1.2;

fn uniform<R: Real, G: Rng + ?Sized>(rng: &mut G, lo: f64, hi: f64) -> R {
    R::lit(rng.random_range(lo..hi))
}

/// Uniform point of the box in `Ŵ` coordinates (angles in `[0, 2π)`).
pub fn sample_model_point<R: Real, G: Rng + ?Sized>(model: &WeinsteinModel<R>, rng: &mut G) -> Vec<R> {
    (0..model.dim())
        .map(|i| if model.chart().is_periodic(i) { uniform(rng, 0.0, std::f64::consts::TAU) } else { uniform(rng, -AMBIENT_BOX, AMBIENT_BOX) })
        .collect()
}

/// Uniform point of the box in the doubled chart.
pub fn sample_ambient_point<R: Real, G: Rng + ?Sized>(ds: &DoubledSpace<R>, rng: &mut G) -> Vec<R> {
    let mut x = sample_model_point(ds.model(), rng);
    x.push(uniform(rng, -AMBIENT_BOX, AMBIENT_BOX));
    x.push(uniform(rng, 0.0, std::f64::consts::TAU));
    x
}

pub fn sample_ambient_points<R: Real, G: Rng + ?Sized>(ds: &DoubledSpace<R>, count: usize, rng: &mut G) -> Vec<Vec<R>> {
    (0..count).map(|_| sample_ambient_point(ds, rng)).collect()
}

pub fn sample_model_points<R: Real, G: Rng + ?Sized>(model: &WeinsteinModel<R>, count: usize, rng: &mut G) -> Vec<Vec<R>> {
    (0..count).map(|_| sample_model_point(model, rng)).collect()
}

/// Components uniform in `[-1, 1)`.
pub fn random_vector<R: Real, G: Rng + ?Sized>(dim: usize, rng: &mut G) -> Vec<R> {
    (0..dim).map(|_| uniform(rng, -1.0, 1.0)).collect()
}

/// A point of `{fᴰ = 0}`: `ψ` is drawn uniformly from `[min ψ, c]`, which
/// covers the inner plateau and the whole transition band, then `s = ±√(−f)`.
pub fn sample_surface_point<R: Real, G: Rng + ?Sized>(ds: &DoubledSpace<R>, rng: &mut G) -> Vec<R> {
    let model = ds.model();
    let lo = model.min_psi_f().as_f64();
    let target = R::lit(rng.random_range(lo..=model.c().as_f64()));
    let mut x = vec![R::zero(); model.dim()];
    // the radial part: coordinates that ψ depends on
    let radial: Vec<usize> = match model.kind() {
        ModelKind::Flat => (0..model.dim()).collect(),
        ModelKind::Torus => {
            for q in x.iter_mut().take(model.n()) {
                *q = uniform(rng, 0.0, std::f64::consts::TAU);
            }
            (model.n()..model.dim()).collect()
        }
    };
    let dir: Vec<f64> = radial.iter().map(|_| rng.sample(StandardNormal)).collect();
    let len = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let rho = (target - model.min_psi_f()).max(R::zero()).sqrt();
    for (&i, d) in radial.iter().zip(&dir) {
        x[i] = rho * R::lit(d / len);
    }
    let f = ds.f(&x);
    let s = (-f).max(R::zero()).sqrt();
    x.push(if rng.random_bool(0.5) { s } else { -s });
    x.push(uniform(rng, 0.0, std::f64::consts::TAU));
    x
}

pub fn sample_surface_points<R: Real, G: Rng + ?Sized>(ds: &DoubledSpace<R>, count: usize, rng: &mut G) -> Vec<Vec<R>> {
    (0..count).map(|_| sample_surface_point(ds, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weinstein::cutoff::{cutoff_equation, CutoffSpec, RegularEquation};
    use crate::weinstein::double::double;
    use crate::weinstein::model::{make_flat_model, make_torus_model};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn surface_points_satisfy_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [make_flat_model::<f64>(2).unwrap(), make_torus_model(1).unwrap()] {
            for f in [cutoff_equation(&m, CutoffSpec::for_model(&m).unwrap()), RegularEquation::shifted(&m)] {
                let ds = double(&m, f).unwrap();
                for x in sample_surface_points(&ds, 200, &mut rng) {
                    assert!(ds.f_d(&x).abs() < 1e-14, "{x:?}");
                }
            }
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let m = make_flat_model::<f64>(1).unwrap();
        let ds = double(&m, RegularEquation::shifted(&m)).unwrap();
        let a = sample_surface_points(&ds, 5, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_surface_points(&ds, 5, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
