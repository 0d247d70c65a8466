//! String-matching core: recurrence times, match lengths, windowed longest
//! matches and LZ-78 parsing.

mod lz78;
mod matcher;
mod profile;
mod scan;

pub use lz78::{lz78_parse, Lz78Parse, Lz78Phrase};
pub use matcher::{longest_match_in_window, longest_match_naive, MatchIndex, MatchResult};
pub use profile::{ProfileSample, RecurrenceProfile};
pub use scan::{recurrence_times, BlockHasher};

use crate::error::{LabError, Result};
use crate::SymbolSeq;

/// Outcome of a recurrence-time query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Recurrence {
    /// The smallest lag `l >= 1` at which the block reappears.
    Found(u64),
    /// No reappearance within the permitted lookback.
    Censored,
}

impl Recurrence {
    pub fn value(self) -> Option<u64> {
        match self {
            Recurrence::Found(r) => Some(r),
            Recurrence::Censored => None,
        }
    }

    pub fn is_censored(self) -> bool {
        self == Recurrence::Censored
    }
}

/// A match length together with whether it ran into the end of the data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchLength {
    pub length: usize,
    pub capped: bool,
}

/// `R_n` at position `i`: the smallest `l` in `1..=min(i, max_lookback)` with
/// `x[i..i+n] == x[i-l..i-l+n]`. The earlier copy may overlap the block.
pub fn recurrence_time(seq: &SymbolSeq, i: usize, n: usize, max_lookback: usize) -> Result<Recurrence> {
    let x = seq.symbols();
    check_block(x.len(), i, n)?;
    let lookback = max_lookback.min(i);
    Ok(recurrence_times(x, seq.alphabet_size(), n, i..i + 1, |_| lookback)[0])
}

/// `L_m` at position `i`: the longest `j` such that `x[i..i+j]` has a copy
/// starting at one of the `m` previous positions, capped at `len - i`.
pub fn match_length(seq: &SymbolSeq, i: usize, m: usize) -> Result<MatchLength> {
    let x = seq.symbols();
    if m == 0 || m > i || i >= x.len() {
        return Err(LabError::Bounds(format!(
            "match length needs 1 <= m <= i < len, got m = {m}, i = {i}, len = {}",
            x.len()
        )));
    }
    let cap = x.len() - i;
    let found = longest_match_naive(x, i, i - m, m, cap, true);
    Ok(MatchLength { length: found.length, capped: found.length == cap })
}

pub(crate) fn check_block(len: usize, i: usize, n: usize) -> Result<()> {
    if n == 0 || i == 0 || i.checked_add(n).is_none_or(|end| end > len) {
        return Err(LabError::Bounds(format!(
            "block at {i} of length {n} needs 1 <= i, n >= 1 and i + n <= {len}"
        )));
    }
    Ok(())
}
