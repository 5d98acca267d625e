//! Seeded random streams.
//!
//! Variates come from ChaCha8 through the ziggurat normal sampler of
//! `rand_distr`; both are platform independent, so a (seed, index) pair
//! gives the same path everywhere.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed for replicate `index` of an ensemble rooted at `seed`.
///
/// A SplitMix64 finalizer of `seed + index * GOLDEN`; the finalizer is a
/// bijection, so distinct indices under one seed never collide.
pub fn derive_subseed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream of uniform and standard normal variates.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform on (0, 1).
    pub fn uniform(&mut self) -> f64 {
        Open01.sample(&mut self.rng)
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.normal();
        }
    }
}
