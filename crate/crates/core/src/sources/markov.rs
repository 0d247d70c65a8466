//! Finite-state Markov chain structure: closed classes, period, stationary
//! distribution, entropy rate and time reversal.

use crate::error::{LabError, Result};

/// Communicating-class structure of a transition matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStructure {
    /// Closed communicating classes, each sorted.
    pub closed_classes: Vec<Vec<usize>>,
    /// States outside every closed class.
    pub transient: Vec<usize>,
    /// Period of the first closed class.
    pub period: usize,
}

impl ChainStructure {
    pub fn irreducible(&self) -> bool {
        self.closed_classes.len() == 1 && self.transient.is_empty()
    }

    pub fn ergodic(&self) -> bool {
        self.irreducible() && self.period == 1
    }

    pub fn describe(&self) -> String {
        if self.closed_classes.len() > 1 {
            format!("reducible: {} closed classes {:?}", self.closed_classes.len(), self.closed_classes)
        } else if !self.transient.is_empty() {
            format!("reducible: transient states {:?}", self.transient)
        } else if self.period > 1 {
            format!("periodic with period {}", self.period)
        } else {
            "irreducible and aperiodic".into()
        }
    }
}

pub fn analyze(trans: &[Vec<f64>]) -> ChainStructure {
    let k = trans.len();
    let mut reach = vec![vec![false; k]; k];
    for i in 0..k {
        reach[i][i] = true;
        for j in 0..k {
            if trans[i][j] > 0.0 {
                reach[i][j] = true;
            }
        }
    }
    for m in 0..k {
        for i in 0..k {
            if reach[i][m] {
                for j in 0..k {
                    if reach[m][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut seen = vec![false; k];
    let mut closed_classes = Vec::new();
    let mut transient = Vec::new();
    for i in 0..k {
        if seen[i] {
            continue;
        }
        let class: Vec<usize> = (0..k).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &class {
            seen[j] = true;
        }
        let closed = class.iter().all(|&u| (0..k).all(|v| !reach[u][v] || class.contains(&v)));
        if closed {
            closed_classes.push(class);
        } else {
            transient.extend(class);
        }
    }
    transient.sort_unstable();
    let period = closed_classes.first().map_or(1, |c| class_period(trans, c));
    ChainStructure { closed_classes, transient, period }
}

/// Period of a communicating class: gcd of `level(u) + 1 − level(v)` over
/// its edges, with BFS levels from the first state.
fn class_period(trans: &[Vec<f64>], class: &[usize]) -> usize {
    let k = trans.len();
    let mut level = vec![usize::MAX; k];
    let mut queue = std::collections::VecDeque::from([class[0]]);
    level[class[0]] = 0;
    while let Some(u) = queue.pop_front() {
        for v in 0..k {
            if trans[u][v] > 0.0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0i64;
    for &u in class {
        for &v in class {
            if trans[u][v] > 0.0 {
                let diff = (level[u] as i64 + 1 - level[v] as i64).abs();
                g = gcd(g, diff);
            }
        }
    }
    g.max(1) as usize
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Unique stationary distribution, solved by Gaussian elimination and one
/// step of iterative refinement.
pub fn stationary(trans: &[Vec<f64>]) -> Result<Vec<f64>> {
    let structure = analyze(trans);
    if structure.closed_classes.len() != 1 {
        return Err(LabError::NonErgodic(structure.describe()));
    }
    let k = trans.len();
    // Rows of (Pᵀ − I) with the last equation replaced by Σπ = 1.
    let mut a = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = trans[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[k - 1] = vec![1.0; k];
    let mut rhs = vec![0.0; k];
    rhs[k - 1] = 1.0;
    let mut pi = solve(&a, &rhs)?;
    let residual: Vec<f64> = (0..k)
        .map(|i| rhs[i] - (0..k).map(|j| a[i][j] * pi[j]).sum::<f64>())
        .collect();
    let correction = solve(&a, &residual)?;
    for (p, c) in pi.iter_mut().zip(correction) {
        *p += c;
    }
    for p in pi.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    Ok(pi)
}

fn solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let k = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &r)| {
        let mut row = row.clone();
        row.push(r);
        row
    }).collect();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .expect("non-empty");
        if m[pivot][col].abs() < 1e-300 {
            return Err(LabError::NonErgodic("singular stationary system".into()));
        }
        m.swap(col, pivot);
        for row in 0..k {
            if row != col {
                let f = m[row][col] / m[col][col];
                if f != 0.0 {
                    for c in col..=k {
                        m[row][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Ok((0..k).map(|i| m[i][k] / m[i][i]).collect())
}

/// Entropy rate in bits: `Σ_i π_i Σ_j −P_ij log2 P_ij`.
pub fn entropy_rate(trans: &[Vec<f64>]) -> Result<f64> {
    let pi = stationary(trans)?;
    Ok(pi
        .iter()
        .zip(trans)
        .map(|(p, row)| p * row.iter().filter(|&&q| q > 0.0).map(|q| -q * q.log2()).sum::<f64>())
        .sum())
}

/// Transition matrix of the time-reversed stationary chain,
/// `P̃_ij = π_j P_ji / π_i`.
pub fn reversed(trans: &[Vec<f64>], pi: &[f64]) -> Vec<Vec<f64>> {
    let k = trans.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if pi[i] > 0.0 { pi[j] * trans[j][i] / pi[i] } else { trans[i][j] })
                .collect()
        })
        .collect()
}
