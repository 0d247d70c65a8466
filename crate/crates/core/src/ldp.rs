//! Monte Carlo tail probabilities of recurrence times and of the
//! recurrence-time estimator, with exponential rate fits.
//!
//! Each trial draws an independent stationary realisation and looks at the
//! block `x[0..n]` against its infinite past. The past is produced on
//! demand by running the time-reversed process forward from the block:
//! i.i.d. sources are their own reversal, a stationary Markov chain reverses
//! to `P̃_ij = π_j P_ji / π_i` started from `π`, and a periodic source is its
//! reversed pattern at a uniform phase. In reversed coordinates `y` the
//! block is `y[0..n]` and `R_n` is the first `l >= 1` with
//! `y[l..l+n] == y[0..n]`, so no history needs to be stored.
//!
//! Trial `t` at block length `n` reads ChaCha stream `(n << 40) | t` of the
//! root seed, so the same trials serve every `ε` and results do not depend
//! on evaluation order.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::rng::{cumulative, SeededStream};
use crate::sources::{markov, true_entropy, SourceSpec};
use crate::stats::{linear_fit, wilson};

/// Largest `n (H + ε)` accepted, bounding the scan per trial.
pub const MAX_EXPONENT: f64 = 34.0;

/// Fewest trials accepted by the tail estimators.
pub const MIN_TRIALS: u64 = 1000;

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(LabError::InvalidArgument(format!("{trials} trials; tail estimates need at least {MIN_TRIALS}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// `log2 R_n / n > H + ε`.
    Upper,
    /// `log2 R_n / n < H - ε`.
    Lower,
    /// `|J_n - H| > ε`.
    Estimator,
}

impl Tail {
    pub fn name(self) -> &'static str {
        match self {
            Tail::Upper => "upper",
            Tail::Lower => "lower",
            Tail::Estimator => "estimator",
        }
    }
}

/// Frequency of one tail event at one `(n, ε)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCell {
    pub n: usize,
    pub eps: f64,
    pub tail: Tail,
    pub events: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Trials whose scan stopped at the cap without a recurrence.
    pub censored: u64,
}

/// Least-squares fit of `ln p̂ = -rate · n + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `rate ± 1.96 · se`, the standard error from the regression.
    pub band: (f64, f64),
    /// Block lengths dropped because `p̂ = 0` there.
    pub dropped: Vec<usize>,
}

impl RateFit {
    /// Whether zero cells were dropped before fitting.
    pub fn flagged(&self) -> bool {
        !self.dropped.is_empty()
    }
}

/// Fit of one tail at one `ε`, or why it was refused.
#[derive(Clone, Debug, PartialEq)]
pub struct TailFit {
    pub eps: f64,
    pub tail: Tail,
    pub fit: std::result::Result<RateFit, String>,
}

/// Tail frequencies over an `(n, ε)` grid with fitted decay rates.
#[derive(Clone, Debug, PartialEq)]
pub struct TailEstimate {
    pub entropy: f64,
    pub n_grid: Vec<usize>,
    pub eps_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub cells: Vec<TailCell>,
    pub fits: Vec<TailFit>,
}

impl TailEstimate {
    pub fn cell(&self, n: usize, eps: f64, tail: Tail) -> Option<&TailCell> {
        self.cells.iter().find(|c| c.n == n && c.eps == eps && c.tail == tail)
    }

    pub fn fit(&self, eps: f64, tail: Tail) -> Option<&TailFit> {
        self.fits.iter().find(|f| f.eps == eps && f.tail == tail)
    }

    /// `p̂` over the block-length grid for one `(ε, tail)`.
    pub fn series(&self, eps: f64, tail: Tail) -> Vec<f64> {
        self.n_grid.iter().filter_map(|&n| self.cell(n, eps, tail).map(|c| c.p_hat)).collect()
    }

    /// `I(ε)`: the smaller of the two one-sided rates, when both were fitted.
    pub fn rate_function(&self, eps: f64) -> Option<f64> {
        let rate = |t| self.fit(eps, t).and_then(|f| f.fit.as_ref().ok()).map(|f| f.rate);
        Some(rate(Tail::Upper)?.min(rate(Tail::Lower)?))
    }

    /// Columns `n,eps,tail,p_hat,ci_lo,ci_hi,trials,censored`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "eps", "tail", "p_hat", "ci_lo", "ci_hi", "trials", "censored"])?;
        for c in &self.cells {
            out.write_record([
                c.n.to_string(),
                c.eps.to_string(),
                c.tail.name().to_string(),
                format!("{:.9}", c.p_hat),
                format!("{:.9}", c.ci_lo),
                format!("{:.9}", c.ci_hi),
                c.trials.to_string(),
                c.censored.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Columns `eps,tail,rate,intercept,r2,band_lo,band_hi,dropped,status`
    /// and one `rate_function` row per `ε` holding `I(ε)`.
    pub fn write_fit_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["eps", "tail", "rate", "intercept", "r2", "band_lo", "band_hi", "dropped", "status"])?;
        for f in &self.fits {
            match &f.fit {
                Ok(r) => out.write_record([
                    f.eps.to_string(),
                    f.tail.name().to_string(),
                    format!("{:.9}", r.rate),
                    format!("{:.9}", r.intercept),
                    format!("{:.9}", r.r2),
                    format!("{:.9}", r.band.0),
                    format!("{:.9}", r.band.1),
                    r.dropped.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
                    "ok".into(),
                ])?,
                Err(reason) => out.write_record([
                    f.eps.to_string(),
                    f.tail.name().to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    reason.clone(),
                ])?,
            }
        }
        for &eps in &self.eps_grid {
            if let Some(i) = self.rate_function(eps) {
                let empty = String::new;
                out.write_record([
                    eps.to_string(),
                    "rate_function".into(),
                    format!("{i:.9}"),
                    empty(),
                    empty(),
                    empty(),
                    empty(),
                    empty(),
                    "ok".into(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Fits `ln p̂ = -rate · n + b`, dropping zero cells.
///
/// Refused with fewer than three positive cells or when more than half the
/// cells are zero.
pub fn rate_fit(n_grid: &[usize], p_hat: &[f64]) -> Result<RateFit> {
    if n_grid.len() != p_hat.len() {
        return Err(LabError::InvalidArgument("grid and frequencies differ in length".into()));
    }
    if let Some(p) = p_hat.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(LabError::InvalidArgument(format!("frequency {p} outside [0, 1]")));
    }
    let zeros = p_hat.iter().filter(|&&p| p == 0.0).count();
    let positive = p_hat.len() - zeros;
    if positive < 3 {
        return Err(LabError::Refused(format!("{positive} cells with p > 0, need at least 3")));
    }
    if 2 * zeros > p_hat.len() {
        return Err(LabError::Refused(format!("{zeros} of {} cells are zero", p_hat.len())));
    }
    let (x, y): (Vec<f64>, Vec<f64>) =
        n_grid.iter().zip(p_hat).filter(|(_, &p)| p > 0.0).map(|(&n, &p)| (n as f64, p.ln())).unzip();
    let fit = linear_fit(&x, &y).ok_or_else(|| LabError::Refused("block lengths are all equal".into()))?;
    let rate = -fit.slope;
    let half = 1.959_963_984_540_054 * fit.slope_se;
    Ok(RateFit {
        rate,
        intercept: fit.intercept,
        r2: fit.r2,
        band: (rate - half, rate + half),
        dropped: n_grid.iter().zip(p_hat).filter(|(_, &p)| p == 0.0).map(|(&n, _)| n).collect(),
    })
}

/// Symbol generator for the time-reversed stationary process.
#[derive(Clone, Debug)]
enum Reversed {
    Iid { cdf: Vec<f64> },
    Markov { start: Vec<f64>, rows: Vec<Vec<f64>> },
    Periodic { pattern: Vec<u8> },
}

struct Walker<'a> {
    source: &'a Reversed,
    rng: SeededStream,
    state: usize,
    started: bool,
}

impl<'a> Walker<'a> {
    fn new(source: &'a Reversed, seed: u64, stream: u64) -> Self {
        let mut rng = SeededStream::new(seed, stream);
        let state = match source {
            Reversed::Periodic { pattern } => (rng.uniform() * pattern.len() as f64) as usize % pattern.len(),
            _ => 0,
        };
        Self { source, rng, state, started: false }
    }

    #[inline]
    fn next(&mut self) -> u8 {
        match self.source {
            Reversed::Iid { cdf } => self.rng.categorical(cdf),
            Reversed::Markov { start, rows } => {
                let table = if self.started { &rows[self.state] } else { start };
                self.started = true;
                self.state = self.rng.categorical(table) as usize;
                self.state as u8
            }
            Reversed::Periodic { pattern } => {
                let s = pattern[self.state];
                self.state = (self.state + 1) % pattern.len();
                s
            }
        }
    }
}

struct Setup {
    source: Reversed,
    entropy: f64,
    beta: u32,
}

fn setup(spec: &SourceSpec, allow_periodic: bool) -> Result<Setup> {
    spec.validate()?;
    let source = match spec {
        SourceSpec::Iid { probs } => Reversed::Iid { cdf: cumulative(probs) },
        SourceSpec::Markov { trans, .. } => {
            let structure = markov::analyze(trans);
            if !structure.ergodic() {
                return Err(LabError::Refused(format!(
                    "tail estimation needs an aperiodic irreducible chain; this one is {}",
                    structure.describe()
                )));
            }
            let pi = markov::stationary(trans)?;
            let rows = markov::reversed(trans, &pi).iter().map(|r| cumulative(r)).collect();
            Reversed::Markov { start: cumulative(&pi), rows }
        }
        SourceSpec::Periodic { pattern, .. } if allow_periodic => {
            Reversed::Periodic { pattern: pattern.iter().rev().copied().collect() }
        }
        other => {
            return Err(LabError::Refused(format!("tail estimation does not support {} sources", other.kind().name())));
        }
    };
    Ok(Setup { source, entropy: true_entropy(spec)?, beta: crate::ceil_log2(spec.alphabet_size() as u64).max(1) })
}

fn check_grid(setup: &Setup, n_grid: &[usize], eps_max: f64, trials: u64) -> Result<()> {
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(LabError::InvalidArgument("block-length grid must be non-empty and positive".into()));
    }
    if trials == 0 {
        return Err(LabError::InvalidArgument("at least one trial is needed".into()));
    }
    for &n in n_grid {
        let exponent = n as f64 * (setup.entropy + eps_max);
        if exponent > MAX_EXPONENT {
            return Err(LabError::Refused(format!(
                "n (H + eps) = {exponent:.2} exceeds {MAX_EXPONENT} at n = {n}"
            )));
        }
        if setup.beta as usize * n > 64 {
            return Err(LabError::Refused(format!("blocks of {n} symbols do not fit a 64-bit key")));
        }
    }
    Ok(())
}

fn stream_id(n: usize, trial: u64) -> u64 {
    ((n as u64) << 40) | trial
}

fn block_mask(bits: usize) -> u64 {
    if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 }
}

/// Recurrence time of the initial block of one trial; `None` when no
/// recurrence occurs at lags up to `cap`.
fn first_return(walker: &mut Walker<'_>, n: usize, beta: u32, cap: u64) -> Option<u64> {
    let mask = block_mask(beta as usize * n);
    let mut key = 0u64;
    for _ in 0..n {
        key = ((key << beta) | walker.next() as u64) & mask;
    }
    let target = key;
    for l in 1..=cap {
        key = ((key << beta) | walker.next() as u64) & mask;
        if key == target {
            return Some(l);
        }
    }
    None
}

fn cells_for(n: usize, eps_grid: &[f64], entropy: f64, returns: &[Option<u64>], censored: u64) -> Vec<TailCell> {
    let trials = returns.len() as u64;
    let mut out = Vec::new();
    for &eps in eps_grid {
        let upper_threshold = (n as f64 * (entropy + eps)).exp2();
        let lower_threshold = (n as f64 * (entropy - eps)).exp2();
        let upper = returns.iter().filter(|r| r.is_none_or(|v| v as f64 > upper_threshold)).count() as u64;
        let lower = returns.iter().filter(|r| r.is_some_and(|v| (v as f64) < lower_threshold)).count() as u64;
        for (tail, events) in [(Tail::Upper, upper), (Tail::Lower, lower)] {
            let (ci_lo, ci_hi) = wilson(events, trials);
            out.push(TailCell {
                n,
                eps,
                tail,
                events,
                trials,
                p_hat: events as f64 / trials as f64,
                ci_lo,
                ci_hi,
                censored,
            });
        }
    }
    out
}

fn fits_for(n_grid: &[usize], eps_grid: &[f64], tails: &[Tail], cells: &[TailCell]) -> Vec<TailFit> {
    let mut out = Vec::new();
    for &eps in eps_grid {
        for &tail in tails {
            let p: Vec<f64> = n_grid
                .iter()
                .map(|&n| cells.iter().find(|c| c.n == n && c.eps == eps && c.tail == tail).map_or(0.0, |c| c.p_hat))
                .collect();
            out.push(TailFit { eps, tail, fit: rate_fit(n_grid, &p).map_err(|e| e.to_string()) });
        }
    }
    out
}

/// Recurrence-time tail frequencies `P(log2 R_n / n > H + ε)` and
/// `P(log2 R_n / n < H - ε)` over the grid.
///
/// Each trial scans lags up to `2 · 2^{n (H + ε_max)}`; a trial without a
/// recurrence by then counts toward every upper-tail event and no
/// lower-tail event, so both are decided exactly.
pub fn tail_probability(spec: &SourceSpec, n_grid: &[usize], eps_grid: &[f64], trials: u64, seed: u64) -> Result<TailEstimate> {
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(LabError::InvalidArgument("eps grid must be non-empty and positive".into()));
    }
    let setup = setup(spec, false)?;
    let eps_max = eps_grid.iter().copied().fold(0.0, f64::max);
    check_grid(&setup, n_grid, eps_max, trials)?;
    check_trials(trials)?;
    let mut cells = Vec::new();
    for &n in n_grid {
        let cap = (2.0 * (n as f64 * (setup.entropy + eps_max)).exp2()).ceil() as u64;
        let returns: Vec<Option<u64>> = (0..trials)
            .into_par_iter()
            .map(|t| first_return(&mut Walker::new(&setup.source, seed, stream_id(n, t)), n, setup.beta, cap))
            .collect();
        let censored = returns.iter().filter(|r| r.is_none()).count() as u64;
        cells.extend(cells_for(n, eps_grid, setup.entropy, &returns, censored));
    }
    let fits = fits_for(n_grid, eps_grid, &[Tail::Upper, Tail::Lower], &cells);
    Ok(TailEstimate {
        entropy: setup.entropy,
        n_grid: n_grid.to_vec(),
        eps_grid: eps_grid.to_vec(),
        trials,
        seed,
        cells,
        fits,
    })
}

/// The first `len` symbols of a trial in reversed coordinates, exactly as
/// the tail scans draw them.
pub fn materialize_trial(spec: &SourceSpec, n: usize, trial: u64, seed: u64, len: usize) -> Result<Vec<u8>> {
    let setup = setup(spec, true)?;
    let mut walker = Walker::new(&setup.source, seed, stream_id(n, trial));
    Ok((0..len).map(|_| walker.next()).collect())
}

/// Recurrence time of one trial's block with lags up to `cap`, as used by
/// [`tail_probability`].
pub fn trial_recurrence(spec: &SourceSpec, n: usize, trial: u64, seed: u64, cap: u64) -> Result<Option<u64>> {
    let setup = setup(spec, true)?;
    check_grid(&setup, &[n], 0.0, 1)?;
    Ok(first_return(&mut Walker::new(&setup.source, seed, stream_id(n, trial)), n, setup.beta, cap))
}

/// `J_n` of one trial from `q` consecutive blocks; censored blocks are left
/// out of the mean. Returns `(J_n, censored)`.
fn trial_estimate(walker: &mut Walker<'_>, n: usize, q: usize, beta: u32, cap: u64) -> (f64, u64) {
    // Reversed coordinates: the q blocks start at y positions 0..q and the
    // recurrence lag of a block is the distance to the next later start
    // with the same key.
    let mask = block_mask(beta as usize * n);
    let mut key = (0..n).fold(0u64, |k, _| ((k << beta) | walker.next() as u64) & mask);
    let mut pending: HashMap<u64, Vec<u64>> = HashMap::new();
    let mut done = vec![false; q];
    let mut oldest = 0usize;
    let mut resolved = 0usize;
    let mut sum = 0.0;
    let mut censored = 0u64;
    let mut p: u64 = 0;
    loop {
        if let Some(waiting) = pending.remove(&key) {
            for a in waiting {
                if !done[a as usize] {
                    done[a as usize] = true;
                    sum += ((p - a) as f64).log2();
                    resolved += 1;
                }
            }
        }
        if (p as usize) < q {
            pending.entry(key).or_default().push(p);
        } else {
            while oldest < q && (done[oldest] || p - oldest as u64 >= cap) {
                if !done[oldest] {
                    done[oldest] = true;
                    censored += 1;
                }
                oldest += 1;
            }
            if oldest == q {
                break;
            }
        }
        p += 1;
        key = ((key << beta) | walker.next() as u64) & mask;
    }
    (if resolved == 0 { f64::NAN } else { sum / (n * resolved) as f64 }, censored)
}

/// Frequency of `|J_n - H| > ε` with `q(n)` blocks per estimate.
///
/// Periodic sources are accepted here (their `J_n` is deterministic);
/// rotation and morphic sources are refused. Lags are scanned up to
/// `2 · 2^{n (H + ε)}` and censored blocks are left out of each `J_n`.
pub fn estimator_tail(
    spec: &SourceSpec,
    n_grid: &[usize],
    eps: f64,
    q: impl Fn(usize) -> usize,
    trials: u64,
    seed: u64,
) -> Result<TailEstimate> {
    if !(eps > 0.0) {
        return Err(LabError::InvalidArgument(format!("eps = {eps} must be positive")));
    }
    let setup = setup(spec, true)?;
    check_grid(&setup, n_grid, eps, trials)?;
    check_trials(trials)?;
    let mut cells = Vec::new();
    for &n in n_grid {
        let blocks = q(n).max(1);
        let cap = (2.0 * (n as f64 * (setup.entropy + eps)).exp2()).ceil() as u64;
        let runs: Vec<(f64, u64)> = (0..trials)
            .into_par_iter()
            .map(|t| trial_estimate(&mut Walker::new(&setup.source, seed, stream_id(n, t)), n, blocks, setup.beta, cap))
            .collect();
        let events = runs.iter().filter(|(j, _)| !((j - setup.entropy).abs() <= eps)).count() as u64;
        let censored = runs.iter().map(|r| r.1).sum();
        let (ci_lo, ci_hi) = wilson(events, trials);
        cells.push(TailCell {
            n,
            eps,
            tail: Tail::Estimator,
            events,
            trials,
            p_hat: events as f64 / trials as f64,
            ci_lo,
            ci_hi,
            censored,
        });
    }
    let fits = fits_for(n_grid, &[eps], &[Tail::Estimator], &cells);
    Ok(TailEstimate {
        entropy: setup.entropy,
        n_grid: n_grid.to_vec(),
        eps_grid: vec![eps],
        trials,
        seed,
        cells,
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_fit() {
        let n = [4, 8, 12, 16];
        let p: Vec<f64> = n.iter().map(|&k| (-0.5 * k as f64).exp()).collect();
        let f = rate_fit(&n, &p).unwrap();
        assert!((f.rate - 0.5).abs() < 1e-9);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!(!f.flagged());
    }

    #[test]
    fn zero_cells_are_dropped_or_refused() {
        let f = rate_fit(&[4, 8, 12, 16], &[0.5, 0.2, 0.05, 0.0]).unwrap();
        assert_eq!(f.dropped, vec![16]);
        assert!(f.flagged());
        assert!(rate_fit(&[4, 8, 12, 16], &[0.5, 0.2, 0.0, 0.0]).is_err());
        assert!(rate_fit(&[4, 8, 12, 16, 20], &[0.5, 0.2, 0.1, 0.0, 0.0]).is_ok());
        assert!(rate_fit(&[4, 8, 12, 16, 20], &[0.5, 0.2, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn guards() {
        let coin = SourceSpec::fair_coin();
        assert!(matches!(tail_probability(&coin, &[30], &[0.3], 10, 0), Err(LabError::Refused(_))));
        let rot = SourceSpec::golden_sturmian();
        assert!(matches!(tail_probability(&rot, &[8], &[0.3], 10, 0), Err(LabError::Refused(_))));
        let per = SourceSpec::periodic(&[0, 1]);
        assert!(tail_probability(&per, &[8], &[0.3], 10, 0).is_err());
        assert!(estimator_tail(&per, &[8], 0.3, |n| n * n, 1000, 0).is_ok());
        assert!(matches!(estimator_tail(&per, &[8], 0.3, |n| n * n, 999, 0), Err(LabError::InvalidArgument(_))));
        let flip = SourceSpec::Markov { trans: vec![vec![0.0, 1.0], vec![1.0, 0.0]], init: vec![0.5, 0.5] };
        assert!(matches!(tail_probability(&flip, &[8], &[0.3], 10, 0), Err(LabError::Refused(_))));
    }

    #[test]
    fn lower_tail_at_eps_equal_entropy_is_empty() {
        let est = tail_probability(&SourceSpec::fair_coin(), &[4, 6, 8], &[1.0], 1000, 3).unwrap();
        assert!(est.series(1.0, Tail::Lower).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn periodic_estimator_tail_steps() {
        let est = estimator_tail(&SourceSpec::periodic(&[0, 1]), &[2, 3, 4, 5, 8], 0.3, |n| n * n, 1000, 1).unwrap();
        let series = est.series(0.3, Tail::Estimator);
        assert_eq!(series, vec![1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn reversed_markov_is_stationary() {
        let spec = SourceSpec::Markov { trans: vec![vec![0.9, 0.1], vec![0.4, 0.6]], init: vec![0.8, 0.2] };
        let y = materialize_trial(&spec, 8, 0, 5, 200_000).unwrap();
        let ones = y.iter().filter(|&&s| s == 1).count() as f64 / y.len() as f64;
        assert!((ones - 0.2).abs() < 0.01, "{ones}");
    }
}
