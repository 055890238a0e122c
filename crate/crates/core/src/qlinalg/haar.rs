use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::density::PureStateVector;

/// Haar-distributed pure state: independent standard complex Gaussian
/// amplitudes, normalized. Deterministic for a fixed seed.
pub fn haar_random_pure_state(dim: usize, seed: u64) -> PureStateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_sample(dim, &mut rng)
}

/// Same sampler, driven by a caller-owned generator.
pub fn haar_sample<R: Rng>(dim: usize, rng: &mut R) -> PureStateVector {
    assert!(dim == 2 || dim == 4, "haar sampling supports dim 2 and 4");
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let dims = if dim == 4 { vec![2, 2] } else { vec![2] };
    PureStateVector::normalized(amps, dims).expect("Gaussian sample is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = haar_random_pure_state(4, 1234);
        let b = haar_random_pure_state(4, 1234);
        assert_eq!(a.amplitudes(), b.amplitudes());
        let c = haar_random_pure_state(4, 1235);
        assert_ne!(a.amplitudes(), c.amplitudes());
    }

    #[test]
    fn unit_norm() {
        for seed in 0..20 {
            let psi = haar_random_pure_state(4, seed);
            let norm: f64 = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_concurrence_of_haar_states() {
        // Monte Carlo oracle: for Haar-random two-qubit pure states the mean
        // of C = 2|ad - bc| sits near 0.588.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 10_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let psi = haar_sample(4, &mut rng);
            let a = psi.amplitudes();
            acc += 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        }
        let mean = acc / n as f64;
        assert!((mean - 0.588).abs() < 0.02, "mean concurrence {mean}");
    }
}
