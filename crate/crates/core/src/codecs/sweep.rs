//! Compression-ratio sweeps over window sizes.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fdfs_encode, fslz_encode, match_length_budget, swlz_encode, BudgetPolicy, Codec, CompressionReport, ELIAS_GAMMA};
use crate::error::{LabError, Result};
use crate::sources::{gen, true_entropy, SourceSpec};
use crate::stats::{linear_fit, mean};

/// Input length for a window size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase", deny_unknown_fields)]
pub enum NRule {
    /// `N = factor · n_w`.
    Multiple { factor: usize },
    /// The same `N` for every window.
    Fixed { n: usize },
}

impl NRule {
    pub fn length(self, n_w: usize) -> usize {
        match self {
            NRule::Multiple { factor } => factor * n_w,
            NRule::Fixed { n } => n,
        }
    }
}

/// Block-length rule for the fixed-shift codecs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoRule {
    pub policy: BudgetPolicy,
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub source: SourceSpec,
    pub codec: Codec,
    pub n_w_grid: Vec<usize>,
    pub n_rule: NRule,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<LoRule>,
}

/// One `(n_w, seed)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n_w: usize,
    pub seed: u64,
    pub report: CompressionReport,
}

/// Exponent `a` from regressing `log2(ratio / log2 n_w)` on `-log2 n_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    /// `actual` uses `actual_ratio`; `coded` uses
    /// [`CompressionReport::coded_ratio`], which leaves out the first window.
    pub quantity: &'static str,
    pub a: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Fits for a zero-entropy source, or the reason none was made.
    pub fits: std::result::Result<Vec<ExponentFit>, String>,
}

impl SweepResult {
    /// Mean of `f(report)` over seeds, per window size in grid order.
    pub fn mean_by_window(&self, f: impl Fn(&CompressionReport) -> f64) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, Vec<f64>)> = Vec::new();
        for row in &self.rows {
            match out.last_mut() {
                Some((w, v)) if *w == row.n_w => v.push(f(&row.report)),
                _ => out.push((row.n_w, vec![f(&row.report)])),
            }
        }
        out.into_iter().map(|(w, v)| (w, mean(&v))).collect()
    }

    pub fn fit(&self, quantity: &str) -> Option<&ExponentFit> {
        self.fits.as_ref().ok()?.iter().find(|f| f.quantity == quantity)
    }

    /// One row per cell: `codec,source,n_w,seed,N,l_o,m,m1,m2,phrases,beta,
    /// header_bits,payload_bits,formula_ratio,actual_ratio,coded_ratio,
    /// window_bits,pointer_bits,length_bits,literal_bits,flag_bits,
    /// tail_bits,degenerate`.
    pub fn write_rows_csv<W: Write>(&self, w: W, source: &str) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "codec", "source", "n_w", "seed", "N", "l_o", "m", "m1", "m2", "phrases", "beta", "header_bits",
            "payload_bits", "formula_ratio", "actual_ratio", "coded_ratio", "window_bits", "pointer_bits",
            "length_bits", "literal_bits", "flag_bits", "tail_bits", "degenerate",
        ])?;
        for row in &self.rows {
            let r = &row.report;
            out.write_record([
                r.codec.name().to_string(),
                source.to_string(),
                row.n_w.to_string(),
                row.seed.to_string(),
                r.n.to_string(),
                r.l_o.map_or(String::new(), |l| l.to_string()),
                r.m.to_string(),
                r.m1.to_string(),
                r.m2.to_string(),
                r.phrases.to_string(),
                r.beta.to_string(),
                r.header_bits.to_string(),
                r.payload_bits.to_string(),
                format!("{:.9}", r.formula_ratio),
                format!("{:.9}", r.actual_ratio),
                format!("{:.9}", r.coded_ratio()),
                r.terms.window.to_string(),
                r.terms.pointers.to_string(),
                r.terms.lengths.to_string(),
                r.terms.literals.to_string(),
                r.terms.flags.to_string(),
                r.terms.tail.to_string(),
                u8::from(r.degenerate).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// `quantity,a,intercept,r2,points,status`; a refused fit is one row
    /// with empty numbers and the reason as status.
    pub fn write_fit_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["quantity", "a", "intercept", "r2", "points", "status"])?;
        match &self.fits {
            Ok(fits) => {
                for f in fits {
                    out.write_record([
                        f.quantity.to_string(),
                        format!("{:.9}", f.a),
                        format!("{:.9}", f.intercept),
                        format!("{:.9}", f.r2),
                        f.points.to_string(),
                        "ok".into(),
                    ])?;
                }
            }
            Err(reason) => out.write_record(["", "", "", "", "", reason.as_str()])?,
        }
        out.flush()?;
        Ok(())
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        if self.n_w_grid.is_empty() || self.seeds.is_empty() {
            return Err(LabError::InvalidArgument("sweep needs at least one window size and one seed".into()));
        }
        if self.n_w_grid.windows(2).any(|w| w[1] <= w[0]) || self.n_w_grid[0] < 2 {
            return Err(LabError::InvalidArgument("window grid must be strictly ascending and start at 2 or more".into()));
        }
        for &n_w in &self.n_w_grid {
            let n = self.n_rule.length(n_w);
            if n < 64 * n_w {
                return Err(LabError::InvalidArgument(format!("N = {n} is below 64·n_w for n_w = {n_w}")));
            }
        }
        if self.codec != Codec::Swlz && self.lo.is_none() {
            return Err(LabError::InvalidArgument(format!("codec {} needs an L_o rule", self.codec.name())));
        }
        Ok(())
    }

    fn cell(&self, n_w: usize, seed: u64) -> Result<SweepRow> {
        let n = self.n_rule.length(n_w);
        let l_o = match &self.lo {
            Some(rule) => Some(match_length_budget(&rule.policy, n_w as u64, rule.eps)?),
            None => None,
        };
        let encoded = match self.codec {
            Codec::Swlz => swlz_encode(&gen(&self.source, n, seed)?, n_w, ELIAS_GAMMA)?,
            Codec::Fslz => fslz_encode(&gen(&self.source, n, seed)?, n_w, l_o.unwrap_or(1))?,
            Codec::Fdfs => {
                let all = gen(&self.source, n_w + n, seed)?;
                fdfs_encode(&all.slice(n_w..n_w + n), &all.slice(0..n_w), l_o.unwrap_or(1))?
            }
        };
        encoded.report.check(&encoded.records)?;
        Ok(SweepRow { n_w, seed, report: encoded.report })
    }
}

/// Runs every `(n_w, seed)` cell, rows ordered by window then seed.
///
/// For FDFS-LZ the database is the `n_w` symbols preceding the `N` coded
/// ones. Exponent fits are made for zero-entropy sources on the per-window
/// mean ratios and need at least three window sizes.
pub fn ratio_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cells: Vec<(usize, u64)> =
        spec.n_w_grid.iter().flat_map(|&w| spec.seeds.iter().map(move |&s| (w, s))).collect();
    let rows = cells.par_iter().map(|&(w, s)| spec.cell(w, s)).collect::<Result<Vec<_>>>()?;
    let mut result = SweepResult { rows, fits: Err(String::new()) };
    result.fits = if true_entropy(&spec.source)? > 0.0 {
        Err("positive-entropy source: no exponent fit".into())
    } else if spec.n_w_grid.len() < 3 {
        Err(format!("fit refused: {} window sizes, need at least 3", spec.n_w_grid.len()))
    } else {
        let mut fits = Vec::new();
        for (quantity, f) in [
            ("actual", (|r: &CompressionReport| r.actual_ratio) as fn(&CompressionReport) -> f64),
            ("coded", |r: &CompressionReport| r.coded_ratio()),
        ] {
            let means = result.mean_by_window(f);
            if means.iter().any(|&(_, r)| !(r > 0.0)) {
                continue;
            }
            let x: Vec<f64> = means.iter().map(|&(w, _)| -(w as f64).log2()).collect();
            let y: Vec<f64> = means.iter().map(|&(w, r)| (r / (w as f64).log2()).log2()).collect();
            if let Some(fit) = linear_fit(&x, &y) {
                fits.push(ExponentFit { quantity, a: fit.slope, intercept: fit.intercept, r2: fit.r2, points: means.len() });
            }
        }
        Ok(fits)
    };
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_grid_refuses_fit() {
        let spec = SweepSpec {
            source: SourceSpec::golden_sturmian(),
            codec: Codec::Swlz,
            n_w_grid: vec![16, 32],
            n_rule: NRule::Multiple { factor: 64 },
            seeds: vec![0],
            lo: None,
        };
        let r = ratio_sweep(&spec).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.fits.is_err());
    }

    #[test]
    fn rejects_short_inputs_and_missing_budget() {
        let mut spec = SweepSpec {
            source: SourceSpec::fair_coin(),
            codec: Codec::Fslz,
            n_w_grid: vec![16, 32, 64],
            n_rule: NRule::Multiple { factor: 64 },
            seeds: vec![1, 2],
            lo: None,
        };
        assert!(ratio_sweep(&spec).is_err());
        spec.lo = Some(LoRule { policy: BudgetPolicy::PositiveEntropy { h: 1.0 }, eps: 0.1 });
        spec.n_rule = NRule::Fixed { n: 2048 };
        assert!(ratio_sweep(&spec).is_err());
        spec.n_rule = NRule::Fixed { n: 4096 };
        let r = ratio_sweep(&spec).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert!(r.fits.is_err());
    }
}
