//! Seeded, platform-stable randomness for the randomized checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
pub use rand_xoshiro::SplitMix64;

/// The generator used by every randomized check in the crate.
pub type CheckRng = SplitMix64;

pub fn seeded(seed: u64) -> CheckRng {
    SplitMix64::seed_from_u64(seed)
}

/// Standard complex Gaussian with unit variance per component.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
