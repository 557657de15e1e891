//! Seeded sampling of chart points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{ChartPoint, C};
use crate::models::KahlerModel;

/// Radius of the sampling polydisk.
pub const SAMPLE_RADIUS: f64 = 0.8;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the closed disk of radius `r`.
pub fn disk_point(rng: &mut impl Rng, r: f64) -> C {
    let rad = r * rng.random::<f64>().sqrt();
    let th = std::f64::consts::TAU * rng.random::<f64>();
    C::from_polar(rad, th)
}

/// Complex number with independent real and imaginary parts in `[-s, s]`.
pub fn box_point(rng: &mut impl Rng, s: f64) -> C {
    C::new(rng.random_range(-s..=s), rng.random_range(-s..=s))
}

/// `count` points of the polydisk `|zᵢ|, |wᵢ| ≤ 0.8` inside the model domain.
pub fn sample_points(model: &KahlerModel, count: usize, seed: u64) -> Vec<ChartPoint> {
    let mut r = rng(seed);
    let n = model.n();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = (0..n).map(|_| disk_point(&mut r, SAMPLE_RADIUS)).collect();
        let w = (0..n).map(|_| disk_point(&mut r, SAMPLE_RADIUS)).collect();
        let p = ChartPoint::new(z, w).expect("finite sample");
        if model.check_domain(&p).is_ok() {
            out.push(p);
        }
    }
    out
}

/// `count` diagonal points `(z, z̄)` with `|zᵢ| ≤ 0.8` inside the model domain.
pub fn sample_diagonal(model: &KahlerModel, count: usize, seed: u64) -> Vec<ChartPoint> {
    let mut r = rng(seed);
    let n = model.n();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = (0..n).map(|_| disk_point(&mut r, SAMPLE_RADIUS)).collect();
        let p = ChartPoint::diagonal(z).expect("finite sample");
        if model.check_domain(&p).is_ok() {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, ModelKind};

    #[test]
    fn samples_are_reproducible_and_bounded() {
        let m = build_model(ModelKind::Cp1).unwrap();
        let a = sample_points(&m, 20, 7);
        let b = sample_points(&m, 20, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.z()[0].norm() <= SAMPLE_RADIUS && p.w()[0].norm() <= SAMPLE_RADIUS));
        assert_ne!(a, sample_points(&m, 20, 8));
    }
}
