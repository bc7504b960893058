//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha::ChaCha8Rng`, whose output
//! is value-stable across platforms and crate releases) seeded through
//! `ChaCha8Rng::seed_from_u64`. Derived streams use [`mix_seed`], a SplitMix64
//! finalizer over the parent seed and a component index, so a map task's
//! randomness depends only on `(master_seed, block_index)` and never on the
//! order in which tasks are scheduled.
//!
//! Conversions from raw 64-bit words are done here rather than through
//! `rand`'s distribution types so that the exact arithmetic is pinned:
//!
//! * `unit()` = `(next_u64 >> 11) * 2^-53`, a value in `[0, 1)`;
//! * `below(n)` = Lemire's widening multiply with rejection;
//! * `uniform(lo, hi)` = `lo + (hi - lo) * unit()`, clamped to `[lo, hi]`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Component index reserved for the reduce phase.
pub const REDUCE_STREAM: u64 = u64::MAX;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed for component `index` of the run seeded by `master`.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for a sub-component (e.g. one map task).
    pub fn derived(master: u64, index: u64) -> Self {
        Self::new(mix_seed(master, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform value in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform value in the closed interval `[lo, hi]`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo + (hi - lo) * self.unit()).clamp(lo, hi)
    }

    /// Uniform integer in `[0, n)`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is empty");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Bernoulli trial with success probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            self.unit() < p
        }
    }
}
