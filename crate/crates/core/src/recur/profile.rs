use std::io::Write;
use std::ops::Range;

use super::{recurrence_times, Recurrence};
use crate::error::{LabError, Result};
use crate::SymbolSeq;

/// One recurrence-time sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProfileSample {
    pub position: usize,
    pub n: usize,
    pub value: Recurrence,
    pub lookback: usize,
}

/// `R_n` sampled over consecutive positions and a grid of block lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceProfile {
    pub positions: Range<usize>,
    pub n_grid: Vec<usize>,
    pub max_lookback: usize,
    pub samples: Vec<ProfileSample>,
}

impl RecurrenceProfile {
    /// Samples ordered by `n` then position; each lookback is
    /// `min(max_lookback, position)`.
    pub fn compute(seq: &SymbolSeq, positions: Range<usize>, n_grid: &[usize], max_lookback: usize) -> Result<Self> {
        if positions.is_empty() || n_grid.is_empty() {
            return Err(LabError::InvalidArgument("profile needs positions and block lengths".into()));
        }
        let mut samples = Vec::with_capacity(positions.len() * n_grid.len());
        for &n in n_grid {
            super::check_block(seq.len(), positions.start, n)?;
            super::check_block(seq.len(), positions.end - 1, n)?;
            let values = recurrence_times(seq.symbols(), seq.alphabet_size(), n, positions.clone(), |_| max_lookback);
            for (position, value) in positions.clone().zip(values) {
                samples.push(ProfileSample { position, n, value, lookback: max_lookback.min(position) });
            }
        }
        Ok(Self { positions, n_grid: n_grid.to_vec(), max_lookback, samples })
    }

    pub fn censored(&self) -> usize {
        self.samples.iter().filter(|s| s.value.is_censored()).count()
    }

    /// Re-checks every sample against the data: lags lie in
    /// `1..=lookback`, copies compare equal, and `R_n` never decreases in `n`.
    pub fn verify(&self, x: &[u8]) -> Result<()> {
        for s in &self.samples {
            if let Recurrence::Found(r) = s.value {
                let r = r as usize;
                if r == 0 || r > s.lookback || x[s.position - r..s.position - r + s.n] != x[s.position..s.position + s.n] {
                    return Err(LabError::Invariant(format!("bad recurrence sample {s:?}")));
                }
            }
        }
        let per_n = self.positions.len();
        for j in 1..self.n_grid.len() {
            if self.n_grid[j] < self.n_grid[j - 1] {
                continue;
            }
            for k in 0..per_n {
                let (a, b) = (self.samples[(j - 1) * per_n + k].value, self.samples[j * per_n + k].value);
                let ordered = match (a, b) {
                    (Recurrence::Found(ra), Recurrence::Found(rb)) => ra <= rb,
                    (Recurrence::Censored, Recurrence::Found(_)) => false,
                    _ => true,
                };
                if !ordered {
                    return Err(LabError::Invariant(format!("R_n decreases in n at position {}", self.samples[k].position)));
                }
            }
        }
        Ok(())
    }

    /// CSV with columns `position,n,value,censored,lookback`; `value` is
    /// empty for censored samples.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["position", "n", "value", "censored", "lookback"])?;
        for s in &self.samples {
            out.write_record([
                s.position.to_string(),
                s.n.to_string(),
                s.value.value().map_or(String::new(), |r| r.to_string()),
                u8::from(s.value.is_censored()).to_string(),
                s.lookback.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
