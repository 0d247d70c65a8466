//! FDFS-LZ, FSLZ and SWLZ codecs with emitted-bit and formula accounting.
//!
//! Every encoder returns the phrase bitstream, a [`CompressionReport`] and
//! one [`PhraseRecord`] per block or phrase. Payload layouts (all fields
//! MSB-first, `β = ⌈log2 |A|⌉`, `P = ⌈log2 n_w⌉`):
//!
//! - FDFS-LZ: per `L_o`-block a flag bit, then a `P`-bit database position
//!   (flag 1) or `β·L_o` literal bits (flag 0); the tail of
//!   `N mod L_o` symbols follows literally.
//! - FSLZ: the first `n_w` symbols literally, then per block a flag bit and
//!   a `P`-bit window offset or `β·L_o` literal bits, then the tail.
//! - SWLZ: the first `n_w` symbols literally, then per phrase a flag bit and
//!   either a `P`-bit window offset followed by the Elias-gamma code of the
//!   length (flag 1), or the phrase symbols literally (flag 0). A literal
//!   phrase is the longest match plus the symbol that breaks it, so the
//!   decoder finds its end without a length field.
//!
//! [`container`] wraps a payload in a fixed 40-byte header.

mod bits;
pub mod budget;
pub mod container;
mod fdfs;
mod fslz;
mod intcode;
pub mod sweep;
mod swlz;

use serde::{Deserialize, Serialize};

pub use bits::{BitReader, BitStream};
pub use budget::{match_length_budget, BudgetPolicy, GrowthFn};
pub use fdfs::{fdfs_decode, fdfs_encode};
pub use fslz::{fslz_decode, fslz_encode};
pub use intcode::{gamma_len, int_code_decode, int_code_encode, read_gamma, write_gamma};
pub use swlz::{swlz_decode, swlz_encode, ELIAS_GAMMA};

use crate::error::{LabError, Result};

/// Codec identifier; the numeric id is stored in container headers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Codec {
    Fdfs,
    Fslz,
    Swlz,
}

impl Codec {
    pub fn id(self) -> u8 {
        match self {
            Codec::Fdfs => 1,
            Codec::Fslz => 2,
            Codec::Swlz => 3,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Codec::Fdfs),
            2 => Ok(Codec::Fslz),
            3 => Ok(Codec::Swlz),
            _ => Err(LabError::Corrupt(format!("unknown codec id {id}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Codec::Fdfs => "fdfs",
            Codec::Fslz => "fslz",
            Codec::Swlz => "swlz",
        }
    }
}

impl std::str::FromStr for Codec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fdfs" => Ok(Codec::Fdfs),
            "fslz" => Ok(Codec::Fslz),
            "swlz" => Ok(Codec::Swlz),
            _ => Err(LabError::InvalidArgument(format!("unknown codec {s:?}; expected fdfs, fslz or swlz"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhraseKind {
    Matched,
    Literal,
}

/// One coded block or phrase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhraseRecord {
    pub kind: PhraseKind,
    /// Position of the phrase in the input.
    pub start: usize,
    /// Offset `s_j` of the copy inside the window or database, counted from
    /// 1; 0 for literal phrases.
    pub offset: usize,
    /// Symbols covered by the phrase.
    pub length: usize,
    /// Longest available match at `start` when the phrase was coded.
    pub match_len: usize,
    /// Bits emitted for the phrase, flag included.
    pub bits_used: u64,
    /// Cost of the branch not taken for the same `match_len` symbols, flag
    /// included; `None` when that branch was unavailable.
    pub rejected_bits: Option<u64>,
    /// Cost of the taken branch over `match_len` symbols, flag included.
    pub chosen_bits: u64,
}

/// Emitted bits split by role.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermBreakdown {
    /// The literally sent first window.
    pub window: u64,
    pub pointers: u64,
    pub lengths: u64,
    /// Literal symbols inside coded blocks or phrases.
    pub literals: u64,
    pub flags: u64,
    /// Literal symbols after the last block.
    pub tail: u64,
}

impl TermBreakdown {
    pub fn total(&self) -> u64 {
        self.window + self.pointers + self.lengths + self.literals + self.flags + self.tail
    }
}

/// Aggregate accounting for one encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub codec: Codec,
    /// Input length `N`.
    pub n: usize,
    /// Window (or database) size.
    pub n_w: usize,
    pub l_o: Option<usize>,
    /// Blocks attempted, matched and missed (fixed-shift codecs).
    pub m: usize,
    pub m1: usize,
    pub m2: usize,
    /// Phrase count `c(N)` (SWLZ), or blocks for the fixed-shift codecs.
    pub phrases: usize,
    pub beta: u32,
    pub header_bits: u64,
    pub payload_bits: u64,
    pub terms: TermBreakdown,
    /// Closed-form bit count with real-valued logs and the `γ log2(L + 1)` length cost.
    pub formula_bits: f64,
    pub formula_ratio: f64,
    /// `payload_bits / N`.
    pub actual_ratio: f64,
    /// All-literal fallback for `N <= n_w` or a one-symbol alphabet.
    pub degenerate: bool,
}

impl CompressionReport {
    /// Bits per symbol after the first window: `(payload - window) / (N - n_w)`.
    pub fn coded_ratio(&self) -> f64 {
        let symbols = self.n.saturating_sub(if self.terms.window > 0 { self.n_w } else { 0 });
        if symbols == 0 {
            return 0.0;
        }
        (self.payload_bits - self.terms.window) as f64 / symbols as f64
    }

    /// Checks the report against its phrase records: the payload equals the
    /// sum of the terms, which equals window + phrase bits + tail.
    pub fn check(&self, phrases: &[PhraseRecord]) -> Result<()> {
        let phrase_bits: u64 = phrases.iter().map(|p| p.bits_used).sum();
        if self.payload_bits != self.terms.total() || self.payload_bits != self.terms.window + phrase_bits + self.terms.tail {
            return Err(LabError::Invariant(format!(
                "payload {} bits, terms {} bits, window + phrases + tail {} bits",
                self.payload_bits,
                self.terms.total(),
                self.terms.window + phrase_bits + self.terms.tail
            )));
        }
        if self.m != self.m1 + self.m2 {
            return Err(LabError::Invariant(format!("m = {} but m1 + m2 = {}", self.m, self.m1 + self.m2)));
        }
        Ok(())
    }
}

/// Output of an encoder.
#[derive(Clone, Debug)]
pub struct Encoded {
    pub stream: BitStream,
    pub report: CompressionReport,
    pub records: Vec<PhraseRecord>,
}

fn write_literals(out: &mut BitStream, symbols: &[u8], beta: u32) {
    for &s in symbols {
        out.push_bits(s as u64, beta);
    }
}

fn read_literals(r: &mut BitReader<'_>, count: usize, beta: u32, alphabet_size: usize, out: &mut Vec<u8>) -> Result<()> {
    for _ in 0..count {
        let s = r.read_bits(beta)?;
        if s as usize >= alphabet_size {
            return Err(LabError::Corrupt(format!("literal {s} outside the alphabet of size {alphabet_size}")));
        }
        out.push(s as u8);
    }
    Ok(())
}

fn finish(payload: &BitStream, r: &BitReader<'_>) -> Result<()> {
    if r.remaining() != 0 {
        return Err(LabError::Corrupt(format!(
            "{} of {} payload bits left unread",
            r.remaining(),
            payload.len_bits()
        )));
    }
    Ok(())
}

fn degenerate_report(codec: Codec, n: usize, n_w: usize, l_o: Option<usize>, beta: u32) -> CompressionReport {
    let bits = n as u64 * beta as u64;
    CompressionReport {
        codec,
        n,
        n_w,
        l_o,
        m: 0,
        m1: 0,
        m2: 0,
        phrases: 0,
        beta,
        header_bits: container::HEADER_BITS,
        payload_bits: bits,
        terms: TermBreakdown { tail: bits, ..TermBreakdown::default() },
        formula_bits: bits as f64,
        formula_ratio: if n == 0 { 0.0 } else { bits as f64 / n as f64 },
        actual_ratio: if n == 0 { 0.0 } else { bits as f64 / n as f64 },
        degenerate: true,
    }
}

fn ratio(bits: f64, n: usize) -> f64 {
    if n == 0 { 0.0 } else { bits / n as f64 }
}
