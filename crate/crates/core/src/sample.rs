//! Seeded random generation of channels and six-channel strategies, shared by
//! the dominance sampler and the test suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chsh::Strategy;
use crate::linalg::{rotation_from_quat, Mat3};
use crate::qubit::ExtremalChannelParams;
use crate::scalar::Real;

/// The crate-wide deterministic RNG.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random rotation via a normalized Gaussian quaternion.
pub fn random_rotation<T: Real, R: Rng>(rng: &mut R) -> Mat3<T> {
    loop {
        let mut q = [0.0f64; 4];
        let mut n = 0.0;
        for c in &mut q {
            // Box-Muller keeps the dependency surface to plain uniforms
            let u1: f64 = rng.random_range(1e-12..1.0);
            let u2: f64 = rng.random();
            *c = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            n += *c * *c;
        }
        if n > 1e-12 {
            let n = n.sqrt();
            return rotation_from_quat([
                T::of(q[0] / n),
                T::of(q[1] / n),
                T::of(q[2] / n),
                T::of(q[3] / n),
            ]);
        }
    }
}

/// Uniform (s0, s1) in [0,1]² with uniform random rotations.
pub fn random_params<T: Real, R: Rng>(rng: &mut R) -> ExtremalChannelParams<T> {
    ExtremalChannelParams {
        s0: T::of(rng.random()),
        s1: T::of(rng.random()),
        r_u: random_rotation(rng),
        r_v: random_rotation(rng),
    }
}

/// Independent random extremal channels for all six registers.
pub fn random_strategy<T: Real, R: Rng>(rng: &mut R) -> Strategy<T> {
    Strategy {
        alice: [random_params(rng), random_params(rng), random_params(rng)],
        bob: [random_params(rng), random_params(rng), random_params(rng)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_special_orthogonal() {
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let r: Mat3<f64> = random_rotation(&mut rng);
            assert!(r.is_special_orthogonal(1e-12));
        }
    }

    #[test]
    fn seeding_is_deterministic() {
        let a: Mat3<f64> = random_rotation(&mut rng_from_seed(42));
        let b: Mat3<f64> = random_rotation(&mut rng_from_seed(42));
        assert_eq!(a.0, b.0);
    }
}
