use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Slack absorbing decimal-representation error before flooring, so that
/// e.g. `11 / 1.1` floors to 10.
const FLOOR_SLACK: f64 = 1e-9;

/// Growth function `f` for the general zero-entropy budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthFn {
    /// `f(n) = log2 n`.
    Log,
    /// `f(n) = √n`.
    Sqrt,
    /// `f(n) = n`.
    Linear,
    /// Tabulated `(n, f(n))` pairs with both coordinates strictly increasing.
    Table(Vec<(u64, f64)>),
}

impl GrowthFn {
    pub fn eval(&self, n: f64) -> Result<f64> {
        Ok(match self {
            GrowthFn::Log => n.log2(),
            GrowthFn::Sqrt => n.sqrt(),
            GrowthFn::Linear => n,
            GrowthFn::Table(points) => {
                check_table(points)?;
                let k = points.partition_point(|&(m, _)| (m as f64) <= n);
                if k == 0 {
                    return Err(LabError::Bounds(format!("{n} is below the growth table")));
                }
                points[k - 1].1
            }
        })
    }

    /// `f^{-1}(y)`; for a table, the largest tabulated `n` with `f(n) <= y`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        Ok(match self {
            GrowthFn::Log => y.exp2(),
            GrowthFn::Sqrt => y.max(0.0).powi(2),
            GrowthFn::Linear => y,
            GrowthFn::Table(points) => {
                check_table(points)?;
                if y > points.last().unwrap().1 {
                    return Err(LabError::Bounds(format!("f^-1({y}) lies beyond the growth table")));
                }
                let k = points.partition_point(|&(_, f)| f <= y + FLOOR_SLACK * y.abs().max(1.0));
                if k == 0 { 1.0 } else { points[k - 1].0 as f64 }
            }
        })
    }
}

fn check_table(points: &[(u64, f64)]) -> Result<()> {
    if points.is_empty() {
        return Err(LabError::InvalidArgument("empty growth table".into()));
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 || !(w[1].1 > w[0].1) {
            return Err(LabError::InvalidArgument(format!(
                "growth table is not strictly increasing at n = {}, so it has no inverse",
                w[1].0
            )));
        }
    }
    Ok(())
}

/// How the fixed block length `L_o` is chosen. In configuration files:
/// `"rotation"`, `{ positive_entropy = { h = 1.0 } }` or
/// `{ general_f = { f = "sqrt", c = 1.0 } }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BudgetPolicy {
    /// `⌊log2 n_w / (H + ε)⌋` for a source of entropy `H > 0`.
    PositiveEntropy { h: f64 },
    /// `⌊n_w^{1/(1+ε)}⌋` for irrational rotations.
    Rotation,
    /// `⌊f^{-1}(log2 n_w / (c + ε))⌋`.
    GeneralF { f: GrowthFn, c: f64 },
}

/// Match-length budget `L_o` for window size `n_w`, at least 1.
pub fn match_length_budget(policy: &BudgetPolicy, n_w: u64, eps: f64) -> Result<usize> {
    if n_w < 2 {
        return Err(LabError::InvalidArgument(format!("window size {n_w} must be at least 2")));
    }
    if !(eps > 0.0) {
        return Err(LabError::InvalidArgument(format!("eps = {eps} must be positive")));
    }
    let log_w = (n_w as f64).log2();
    let raw = match policy {
        BudgetPolicy::PositiveEntropy { h } => {
            if !(*h > 0.0) {
                return Err(LabError::InvalidArgument(format!("entropy {h} must be positive")));
            }
            log_w / (h + eps)
        }
        BudgetPolicy::Rotation => (log_w / (1.0 + eps)).exp2(),
        BudgetPolicy::GeneralF { f, c } => f.inverse(log_w / (c + eps))?,
    };
    let floored = (raw * (1.0 + FLOOR_SLACK)).floor();
    Ok(if floored < 1.0 { 1 } else { floored as usize })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let pe = BudgetPolicy::PositiveEntropy { h: 1.0 };
        assert_eq!(match_length_budget(&pe, 1 << 11, 0.1).unwrap(), 10);
        assert_eq!(match_length_budget(&BudgetPolicy::Rotation, 1 << 20, 0.25).unwrap(), 65536);
        assert_eq!(match_length_budget(&BudgetPolicy::Rotation, 1 << 12, 0.25).unwrap(), 776);
        let sqrt = BudgetPolicy::GeneralF { f: GrowthFn::Sqrt, c: 1.0 };
        assert_eq!(match_length_budget(&sqrt, 1 << 24, 0.5).unwrap(), 256);
    }

    #[test]
    fn clamped_to_one() {
        let pe = BudgetPolicy::PositiveEntropy { h: 8.0 };
        assert_eq!(match_length_budget(&pe, 4, 0.1).unwrap(), 1);
    }

    #[test]
    fn tables() {
        let table = GrowthFn::Table((1..=1000u64).map(|n| (n, (n as f64).sqrt())).collect());
        let policy = BudgetPolicy::GeneralF { f: table, c: 1.0 };
        assert_eq!(match_length_budget(&policy, 1 << 15, 0.5).unwrap(), 100);
        let flat = GrowthFn::Table(vec![(1, 1.0), (2, 1.0), (3, 2.0)]);
        assert!(matches!(flat.inverse(1.5), Err(LabError::InvalidArgument(_))));
        assert!(GrowthFn::Table(vec![(1, 1.0), (2, 2.0)]).inverse(5.0).is_err());
    }

    #[test]
    fn bad_parameters() {
        assert!(match_length_budget(&BudgetPolicy::Rotation, 1, 0.1).is_err());
        assert!(match_length_budget(&BudgetPolicy::Rotation, 16, 0.0).is_err());
        assert!(match_length_budget(&BudgetPolicy::PositiveEntropy { h: 0.0 }, 16, 0.1).is_err());
    }
}
