//! Seeded random source shared by corruptions and the mock detector.
//!
//! The generator is xoshiro256++ seeded through SplitMix64
//! (`rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64`). All derived draws
//! (floats, bounded integers, normals) are computed here with fixed
//! formulas so streams are identical on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct Rng {
    inner: Xoshiro256PlusPlus,
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Seed for item `index` of a batch run with base seed `seed`.
    ///
    /// Consecutive indices land `GOLDEN_GAMMA` apart, which the SplitMix64
    /// seeding step decorrelates.
    pub fn derive_seed(seed: u64, index: u64) -> u64 {
        seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))
    }

    pub fn for_item(seed: u64, index: u64) -> Self {
        Self::seed_from_u64(Self::derive_seed(seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }

    /// Unbiased integer in `[0, n)` (multiply-shift with rejection). `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Standard normal draw via the Box-Muller transform (one variate per call).
    pub fn standard_normal(&mut self) -> f64 {
        // 1 - u keeps the log argument in (0, 1].
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
    }
}
