//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (the 8-round ChaCha
//! stream cipher used as a counter-based generator, `rand_chacha`'s
//! `ChaCha8Rng`). A run has one 64-bit root seed. The key is the root seed
//! expanded by `SeedableRng::seed_from_u64` and each independent task
//! (a sweep cell, a Monte Carlo trial) reads its own ChaCha stream, selected
//! by a 64-bit stream id. ChaCha output is specified by its key, stream id
//! and block counter only, so sequences are identical across platforms,
//! thread counts and evaluation order.
//!
//! Uniform variates are `(next_u64() >> 11) * 2^-53`, i.e. 53-bit multiples
//! of `2^-53` in `[0, 1)`. A categorical draw from a cumulative table picks
//! the first index whose cumulative weight exceeds the variate.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A deterministic random stream identified by `(root seed, stream id)`.
#[derive(Clone, Debug)]
pub struct SeededStream {
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform variate in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draw an index from a cumulative distribution table.
    #[inline]
    pub fn categorical(&mut self, cdf: &[f64]) -> u8 {
        let u = self.uniform();
        pick(cdf, u)
    }
}

/// Index of the first cumulative weight strictly above `u`; the last index
/// absorbs rounding in the final cumulative entry.
#[inline]
pub fn pick(cdf: &[f64], u: f64) -> u8 {
    // For a non-decreasing table the first entry above `u` sits at the
    // number of entries at or below it.
    let head = &cdf[..cdf.len() - 1];
    head.iter().map(|&c| (c <= u) as u8).sum()
}

/// Cumulative table of a probability vector.
pub fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

/// Stream id for the `index`-th task of a named family of tasks.
///
/// Families keep the streams of, say, sweep cells and database draws apart
/// even when their indices coincide.
pub fn task_stream(family: u32, index: u64) -> u64 {
    ((family as u64) << 48) ^ index
}
