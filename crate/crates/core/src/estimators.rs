//! Entropy estimators from recurrence times and match lengths.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::recur::{recurrence_times, MatchIndex, Recurrence};
use crate::SymbolSeq;

/// Censored fraction above which an estimate is flagged unreliable.
pub const UNRELIABLE_CENSORED_FRACTION: f64 = 0.2;

/// One run of the recurrence-time estimator
/// `J_n = (1/Q) Σ log2 R_{n,i} / n` over consecutive anchors.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorRun {
    pub n: usize,
    pub q: usize,
    /// First anchor; anchors are `first_anchor..first_anchor + q`.
    pub first_anchor: usize,
    /// `log2 R / n` for every uncensored anchor, in anchor order.
    pub values: Vec<f64>,
    pub j_n: f64,
    pub censored_count: usize,
    pub history_length: usize,
    pub unreliable: bool,
}

impl EstimatorRun {
    /// CSV `seed,n,q,history,j_n,values,censored,unreliable`, one row per
    /// `(seed, run)`.
    pub fn write_csv<W: Write>(runs: &[(u64, EstimatorRun)], w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["seed", "n", "q", "history", "j_n", "values", "censored", "unreliable"])?;
        for (seed, r) in runs {
            out.write_record([
                seed.to_string(),
                r.n.to_string(),
                r.q.to_string(),
                r.history_length.to_string(),
                format!("{:.9}", r.j_n),
                r.values.len().to_string(),
                r.censored_count.to_string(),
                u8::from(r.unreliable).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `J_n` from `q` consecutive anchors, each allowed `history` past symbols.
///
/// Anchors are `history..history + q` and each lag is searched up to
/// `history`. Censored anchors are left out of the mean and counted; more
/// than 20% censored marks the run unreliable. A run where every anchor is
/// censored has `j_n = NaN`.
pub fn entropy_recurrence(seq: &SymbolSeq, n: usize, q: usize, history: usize) -> Result<EstimatorRun> {
    if n == 0 || q == 0 || history == 0 {
        return Err(LabError::InvalidArgument("n, Q and history must all be positive".into()));
    }
    let need = history + q + n - 1;
    if seq.len() < need {
        return Err(LabError::Bounds(format!(
            "{} symbols cannot host {q} anchors of length {n} with {history} symbols of history (need {need})",
            seq.len()
        )));
    }
    let anchors = history..history + q;
    let times = recurrence_times(seq.symbols(), seq.alphabet_size(), n, anchors.clone(), |_| history);
    let logs: Vec<f64> = times.iter().filter_map(|r| r.value()).map(|r| (r as f64).log2()).collect();
    let censored_count = times.iter().filter(|r| r.is_censored()).count();
    // One division at the end keeps J_n = 1/n exact on periodic input.
    let j_n = if logs.is_empty() { f64::NAN } else { logs.iter().sum::<f64>() / (n * logs.len()) as f64 };
    let values = logs.iter().map(|l| l / n as f64).collect();
    Ok(EstimatorRun {
        n,
        q,
        first_anchor: anchors.start,
        values,
        j_n,
        censored_count,
        history_length: history,
        unreliable: censored_count as f64 > UNRELIABLE_CENSORED_FRACTION * q as f64,
    })
}

/// Convenience form with the default `Q = n²`.
pub fn entropy_recurrence_default(seq: &SymbolSeq, n: usize, history: usize) -> Result<EstimatorRun> {
    entropy_recurrence(seq, n, n * n, history)
}

/// Normalising function `g` in `log2 m / g(L_m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GFn {
    Log,
    Sqrt,
    Linear,
}

impl GFn {
    pub fn eval(self, l: f64) -> f64 {
        match self {
            GFn::Log => l.log2(),
            GFn::Sqrt => l.sqrt(),
            GFn::Linear => l,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GFn::Log => "log",
            GFn::Sqrt => "sqrt",
            GFn::Linear => "linear",
        }
    }
}

impl std::str::FromStr for GFn {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(GFn::Log),
            "sqrt" => Ok(GFn::Sqrt),
            "linear" => Ok(GFn::Linear),
            _ => Err(LabError::InvalidArgument(format!("unknown g {s:?}; expected log, sqrt or linear"))),
        }
    }
}

/// Match-length estimate at one window size.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchPoint {
    pub m: usize,
    /// `log2 m / mean g(L_m)` over the anchors.
    pub estimate: f64,
    pub mean_length: f64,
    pub anchors: usize,
    /// Anchors whose match ran to the end of the data.
    pub capped: usize,
}

/// Series of match-length estimates over a grid of window sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchSeries {
    pub g: GFn,
    pub first_anchor: usize,
    pub points: Vec<MatchPoint>,
}

impl MatchSeries {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["m", "g", "estimate", "mean_length", "anchors", "capped"])?;
        for p in &self.points {
            out.write_record([
                p.m.to_string(),
                self.g.name().to_string(),
                format!("{:.9}", p.estimate),
                format!("{:.6}", p.mean_length),
                p.anchors.to_string(),
                p.capped.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Averages `g(L_m)` over `anchors` consecutive positions starting at the
/// largest `m` in the grid, so every window size sees the same anchors.
pub fn match_series(seq: &SymbolSeq, m_grid: &[usize], anchors: usize, g: GFn) -> Result<MatchSeries> {
    if m_grid.is_empty() || anchors == 0 || m_grid.contains(&0) {
        return Err(LabError::InvalidArgument("match-length estimates need positive window sizes and anchors".into()));
    }
    let m_max = *m_grid.iter().max().unwrap();
    let m_min = *m_grid.iter().min().unwrap();
    if seq.len() < m_max + anchors {
        return Err(LabError::Bounds(format!(
            "{} symbols cannot host {anchors} anchors after a window of {m_max}",
            seq.len()
        )));
    }
    let index = MatchIndex::new(seq.symbols(), seq.alphabet_size(), m_min);
    let points = m_grid
        .iter()
        .map(|&m| {
            let lengths: Vec<_> = (m_max..m_max + anchors).into_par_iter().map(|i| index.match_length(i, m)).collect();
            let mean_g = lengths.iter().map(|l| g.eval(l.length as f64)).sum::<f64>() / anchors as f64;
            let mean_length = lengths.iter().map(|l| l.length as f64).sum::<f64>() / anchors as f64;
            MatchPoint {
                m,
                estimate: (m as f64).log2() / mean_g,
                mean_length,
                anchors,
                capped: lengths.iter().filter(|l| l.capped).count(),
            }
        })
        .collect();
    Ok(MatchSeries { g, first_anchor: m_max, points })
}

/// `log2 m / L_m` per window size, the match-length entropy estimate.
pub fn entropy_matchlength(seq: &SymbolSeq, m_grid: &[usize], anchors: usize) -> Result<MatchSeries> {
    match_series(seq, m_grid, anchors, GFn::Linear)
}

/// A `log2 m / g(L_m)` series with its distance to a target constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Ow2Trend {
    pub series: MatchSeries,
    pub target: f64,
    pub first_distance: f64,
    pub last_distance: f64,
}

impl Ow2Trend {
    /// `last_distance - first_distance`; negative when the series moves
    /// toward the target.
    pub fn convergence(&self) -> f64 {
        self.last_distance - self.first_distance
    }
}

/// Series of `log2 m / g(L_m)` compared with `target`; needs three or more
/// window sizes.
pub fn ow2_trend(seq: &SymbolSeq, g: GFn, m_grid: &[usize], anchors: usize, target: f64) -> Result<Ow2Trend> {
    if m_grid.len() < 3 {
        return Err(LabError::Refused(format!("trend needs at least 3 window sizes, got {}", m_grid.len())));
    }
    let series = match_series(seq, m_grid, anchors, g)?;
    let first_distance = (series.points[0].estimate - target).abs();
    let last_distance = (series.points.last().unwrap().estimate - target).abs();
    Ok(Ow2Trend { series, target, first_distance, last_distance })
}

/// Whether a run's recurrence times all equal `lag`.
pub fn all_recurrences_equal(seq: &SymbolSeq, n: usize, anchors: std::ops::Range<usize>, lag: u64) -> bool {
    recurrence_times(seq.symbols(), seq.alphabet_size(), n, anchors, |i| i)
        .into_iter()
        .all(|r| r == Recurrence::Found(lag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{gen, SourceSpec};

    #[test]
    fn periodic_estimate_is_one_over_n() {
        let s = gen(&SourceSpec::periodic(&[0, 1]), 2000, 0).unwrap();
        for n in [4, 10, 24] {
            let run = entropy_recurrence_default(&s, n, 1000).unwrap();
            assert_eq!(run.j_n, 1.0 / n as f64);
            assert_eq!(run.censored_count, 0);
            assert_eq!(run.values.len(), n * n);
        }
    }

    #[test]
    fn short_data_is_rejected() {
        let s = gen(&SourceSpec::fair_coin(), 100, 0).unwrap();
        assert!(entropy_recurrence(&s, 8, 64, 50).is_err());
    }

    #[test]
    fn heavy_censoring_is_flagged() {
        let s = gen(&SourceSpec::fair_coin(), 5000, 4).unwrap();
        let run = entropy_recurrence(&s, 20, 100, 64).unwrap();
        assert!(run.unreliable);
        assert_eq!(run.values.len() + run.censored_count, 100);
    }

    #[test]
    fn periodic_matches_are_capped() {
        let s = gen(&SourceSpec::periodic(&[0, 1]), 3000, 0).unwrap();
        let series = entropy_matchlength(&s, &[4, 16, 64], 50).unwrap();
        assert!(series.points.iter().all(|p| p.capped == 50));
    }

    #[test]
    fn short_grid_refused() {
        let s = gen(&SourceSpec::fair_coin(), 3000, 0).unwrap();
        assert!(matches!(ow2_trend(&s, GFn::Linear, &[16, 64], 10, 1.0), Err(LabError::Refused(_))));
    }
}
