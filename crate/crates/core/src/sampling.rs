//! Seeded random draws used by the estimators and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::norm;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-stream of `seed`, used when a draw must be retried.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform point on the unit sphere in `ℝ^dim`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `count` unit-norm windows in `ℝ^dim`, reproducible from `seed`.
pub fn random_unit_windows(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count).map(|_| unit_vector(&mut r, dim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_are_unit_and_reproducible() {
        let a = random_unit_windows(5, 3, 11);
        let b = random_unit_windows(5, 3, 11);
        assert_eq!(a, b);
        for w in &a {
            assert!((norm(w) - 1.0).abs() < 1e-12);
        }
        assert_ne!(a, random_unit_windows(5, 3, 12));
    }
}
