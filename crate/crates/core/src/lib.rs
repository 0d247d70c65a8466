//! A laboratory for sliding-window and fixed-window Lempel-Ziv coding of
//! zero-entropy and mixing sources.
//!
//! The crate is organised by capability:
//!
//! - [`sources`]: periodic, i.i.d., Markov, irrational-rotation and morphic
//!   sequence generators, their true entropy, word complexity and continued
//!   fraction diagnostics.
//! - [`recur`]: recurrence times `R_n`, match lengths `L_m`, windowed longest
//!   matches (naive and indexed engines) and LZ-78 parsing.
//! - [`codecs`]: bit-exact FDFS-LZ, FSLZ and SWLZ encoders and decoders with
//!   both formula and emitted bit accounting, plus ratio sweeps.
//! - [`estimators`]: recurrence-time and match-length entropy estimators.
//! - [`ldp`]: Monte Carlo tail probabilities and exponential rate fits.
//! - [`harness`]: experiment configs, presets and CSV output used by the
//!   `lzlab` binary.
//!
//! Positions are 0-based throughout: the block at position `i` is
//! `x[i..i + n]` and its history is `x[..i]`.

pub mod codecs;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod ldp;
pub mod recur;
pub mod rng;
pub mod sources;
pub mod stats;

pub use error::{LabError, Result};
pub use sources::{SourceSpec, SymbolSeq};

/// Number of bits needed to write any value in `0..n` (`⌈log2 n⌉`, 0 for `n <= 1`).
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::ceil_log2;

    #[test]
    fn ceil_log2_small_values() {
        let got: Vec<u32> = (1..=9).map(ceil_log2).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 3, 3, 4]);
        assert_eq!(ceil_log2(1 << 14), 14);
        assert_eq!(ceil_log2((1 << 14) + 1), 15);
    }
}
