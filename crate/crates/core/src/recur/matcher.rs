use std::collections::HashMap;

use super::MatchLength;
use crate::error::{LabError, Result};
use crate::SymbolSeq;

const MERSENNE_61: u64 = (1 << 61) - 1;
const HASH_BASE: u64 = 0x2545_f491_4f6c_dd1d % MERSENNE_61;
const NONE: u32 = u32::MAX;

/// A copy found in a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatchResult {
    /// Absolute start of the copy; 0 when nothing matched.
    pub offset: usize,
    pub length: usize,
    pub found: bool,
}

impl MatchResult {
    pub const NONE: MatchResult = MatchResult { offset: 0, length: 0, found: false };

    fn at(offset: usize, length: usize) -> Self {
        if length == 0 { Self::NONE } else { MatchResult { offset, length, found: true } }
    }
}

/// Longest prefix of `x[pos..pos+max_len]` whose copy starts in
/// `[window_start, window_start + window_len)`, leftmost on ties.
///
/// With `allow_overlap` the copy may run past the window end; without it the
/// copy must end inside the window. Callers guarantee the window precedes
/// `pos` and `pos + max_len <= x.len()`.
pub fn longest_match_naive(
    x: &[u8],
    pos: usize,
    window_start: usize,
    window_len: usize,
    max_len: usize,
    allow_overlap: bool,
) -> MatchResult {
    let window_end = window_start + window_len;
    let target = &x[pos..pos + max_len];
    let mut best = MatchResult::NONE;
    for s in window_start..window_end {
        let limit = if allow_overlap { max_len } else { max_len.min(window_end - s) };
        if limit <= best.length {
            continue;
        }
        let len = common_prefix(&x[s..s + limit], &target[..limit]);
        if len > best.length {
            best = MatchResult::at(s, len);
            if len == max_len {
                break;
            }
        }
    }
    best
}

/// Checked front end of [`longest_match_naive`].
pub fn longest_match_in_window(
    seq: &SymbolSeq,
    pos: usize,
    window_start: usize,
    window_len: usize,
    max_len: usize,
    allow_overlap: bool,
) -> Result<MatchResult> {
    check_window(seq.len(), pos, window_start, window_len, max_len)?;
    Ok(longest_match_naive(seq.symbols(), pos, window_start, window_len, max_len, allow_overlap))
}

fn check_window(len: usize, pos: usize, window_start: usize, window_len: usize, max_len: usize) -> Result<()> {
    if window_len == 0 {
        return Err(LabError::InvalidArgument("empty match window".into()));
    }
    if window_start + window_len > pos || pos > len || max_len > len - pos {
        return Err(LabError::Bounds(format!(
            "window [{window_start}, {}) must precede position {pos} and {max_len} symbols must remain of {len}",
            window_start + window_len
        )));
    }
    Ok(())
}

#[inline]
fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(p, q)| p == q).count()
}

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let s = ((p as u64) & MERSENNE_61) + (p >> 61) as u64;
    if s >= MERSENNE_61 { s - MERSENNE_61 } else { s }
}

/// Indexed longest-match engine over one sequence.
///
/// Positions sharing a `k`-gram are chained so candidate starts in a window
/// can be enumerated without scanning it. Candidate extensions are compared
/// through prefix hashes with a doubling-then-bisection search on the match
/// length, and the winning copy is verified symbol by symbol; a hash
/// collision sends the query to the naive scan. Results equal
/// [`longest_match_naive`] exactly.
#[derive(Clone, Debug)]
pub struct MatchIndex<'a> {
    x: &'a [u8],
    k: usize,
    prev: Vec<u32>,
    prefix: Vec<u64>,
    pows: Vec<u64>,
}

impl<'a> MatchIndex<'a> {
    /// Index with a gram length suited to windows of `window_hint` symbols.
    pub fn new(x: &'a [u8], alphabet_size: usize, window_hint: usize) -> Self {
        Self::with_gram(x, alphabet_size, Self::default_gram(alphabet_size, window_hint))
    }

    /// `⌊log2 w / β⌋ - 2`, kept within `1..=64/β`.
    pub fn default_gram(alphabet_size: usize, window_hint: usize) -> usize {
        let beta = crate::ceil_log2(alphabet_size as u64).max(1) as usize;
        let log_w = (usize::BITS - window_hint.max(2).leading_zeros() - 1) as usize;
        (log_w / beta).saturating_sub(2).clamp(1, 64 / beta)
    }

    /// Index chaining `k`-grams, `1 <= k` and `k * ⌈log2 |A|⌉ <= 64`.
    pub fn with_gram(x: &'a [u8], alphabet_size: usize, k: usize) -> Self {
        assert!(x.len() < NONE as usize, "sequence too long to index");
        let beta = crate::ceil_log2(alphabet_size as u64).max(1) as usize;
        assert!(k >= 1 && k * beta <= 64, "gram does not fit a 64-bit key");
        let mut prev = vec![NONE; x.len()];
        let mut last: HashMap<u64, u32> = HashMap::new();
        if x.len() >= k {
            let mask = if k * beta == 64 { u64::MAX } else { (1u64 << (k * beta)) - 1 };
            let mut key = 0u64;
            for (p, &s) in x.iter().enumerate() {
                key = ((key << beta) | s as u64) & mask;
                if p + 1 >= k {
                    let start = p + 1 - k;
                    if let Some(q) = last.insert(key, start as u32) {
                        prev[start] = q;
                    }
                }
            }
        }
        let mut prefix = Vec::with_capacity(x.len() + 1);
        let mut pows = Vec::with_capacity(x.len() + 1);
        prefix.push(0);
        pows.push(1);
        for &s in x {
            let h = *prefix.last().unwrap();
            let mut next = mul_mod(h, HASH_BASE) + s as u64 + 1;
            if next >= MERSENNE_61 {
                next -= MERSENNE_61;
            }
            prefix.push(next);
            pows.push(mul_mod(*pows.last().unwrap(), HASH_BASE));
        }
        Self { x, k, prev, prefix, pows }
    }

    pub fn gram(&self) -> usize {
        self.k
    }

    pub fn symbols(&self) -> &'a [u8] {
        self.x
    }

    #[inline]
    fn hash(&self, start: usize, len: usize) -> u64 {
        let hi = self.prefix[start + len];
        let lo = mul_mod(self.prefix[start], self.pows[len]);
        if hi >= lo { hi - lo } else { hi + MERSENNE_61 - lo }
    }

    /// Same contract as [`longest_match_naive`].
    pub fn longest_match(
        &self,
        pos: usize,
        window_start: usize,
        window_len: usize,
        max_len: usize,
        allow_overlap: bool,
    ) -> MatchResult {
        let window_end = window_start + window_len;
        let k = self.k;
        if max_len < k {
            return longest_match_naive(self.x, pos, window_start, window_len, max_len, allow_overlap);
        }
        let limit = |s: usize| if allow_overlap { max_len } else { max_len.min(window_end - s) };
        let mut candidates: Vec<usize> = Vec::new();
        let mut q = self.prev[pos];
        while q != NONE && q as usize >= window_start {
            let s = q as usize;
            if s < window_end && limit(s) >= k {
                candidates.push(s);
            }
            q = self.prev[s];
        }
        if candidates.is_empty() {
            return longest_match_naive(self.x, pos, window_start, window_len, k - 1, allow_overlap);
        }
        let holds = |len: usize| {
            let target = self.hash(pos, len);
            candidates.iter().any(|&s| limit(s) >= len && self.hash(s, len) == target)
        };
        let mut lo = k;
        let mut hi = max_len + 1;
        let mut step = k;
        while lo + step < hi {
            if holds(lo + step) {
                lo += step;
                step *= 2;
            } else {
                hi = lo + step;
                break;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let target = self.hash(pos, lo);
        let best = candidates
            .iter()
            .copied()
            .filter(|&s| limit(s) >= lo && self.hash(s, lo) == target)
            .min()
            .expect("k-gram candidates always match their gram");
        if self.x[best..best + lo] == self.x[pos..pos + lo] {
            return MatchResult::at(best, lo);
        }
        longest_match_naive(self.x, pos, window_start, window_len, max_len, allow_overlap)
    }

    /// `L_m` at position `i`, see [`super::match_length`].
    pub fn match_length(&self, i: usize, m: usize) -> MatchLength {
        let cap = self.x.len() - i;
        let found = self.longest_match(i, i - m, m, cap, true);
        MatchLength { length: found.length, capped: found.length == cap }
    }
}
