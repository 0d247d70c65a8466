//! Coding of an irrational rotation `T(x) = (x + θ) mod 1` by a partition
//! of `[0, 1)` into half-open cells `[b_j, b_{j+1})`.
//!
//! Symbol `j` is emitted at index `i` when `frac(phase + i·θ)` lies in cell
//! `j`; values below the first cut point wrap into the last cell.

use std::cmp::Ordering;

use super::real::{field_of, overflow, sign, Quad, Real};
use crate::error::{LabError, Result};

/// Largest sequence length generated on the fixed-point path.
///
/// The representation error of a 128-bit θ accumulates to at most
/// `n·2^-128`, so this keeps the orbit within `2^-80` of the true one.
pub const FIXED_POINT_HORIZON: u64 = 1 << 48;

/// Orbit generator for a validated rotation source.
pub enum RotationCoder {
    Exact(ExactOrbit),
    Fixed(FixedOrbit),
}

impl RotationCoder {
    pub fn new(theta: &Real, phase: &Real, boundaries: &[Real]) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(LabError::InvalidSource("rotation needs at least one cut point".into()));
        }
        if theta.is_exact() {
            ExactOrbit::new(theta, phase, boundaries).map(RotationCoder::Exact)
        } else {
            FixedOrbit::new(theta, phase, boundaries).map(RotationCoder::Fixed)
        }
    }

    pub fn generate(&mut self, n: usize) -> Result<Vec<u8>> {
        match self {
            RotationCoder::Exact(o) => o.generate(n),
            RotationCoder::Fixed(o) => {
                if n as u64 > FIXED_POINT_HORIZON {
                    return Err(LabError::Precision(format!(
                        "fixed-point rotation of length {n} exceeds the safe horizon 2^48"
                    )));
                }
                Ok(o.generate(n))
            }
        }
    }
}

/// All values over a common denominator `c` in `Q(√d)`: `(a + b√d)/c`.
pub struct ExactOrbit {
    d: i128,
    c: i128,
    theta: (i128, i128),
    state: (i128, i128),
    cuts: Vec<(i128, i128)>,
}

fn lcm(x: i128, y: i128) -> Option<i128> {
    fn gcd(mut a: i128, mut b: i128) -> i128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }
    (x / gcd(x, y)).checked_mul(y)
}

impl ExactOrbit {
    fn new(theta: &Real, phase: &Real, boundaries: &[Real]) -> Result<Self> {
        let exact = |r: &Real| -> Result<Quad> {
            r.to_quad()?.ok_or_else(|| {
                LabError::InvalidSource("fixed-point values cannot be mixed with an exact angle".into())
            })
        };
        let t = exact(theta)?;
        if t.is_rational() {
            return Err(LabError::InvalidSource("rotation angle must be irrational".into()));
        }
        let p = exact(phase)?;
        let cuts: Vec<Quad> = boundaries.iter().map(exact).collect::<Result<_>>()?;

        let mut d = t.d;
        let mut c = t.c;
        for q in std::iter::once(&p).chain(cuts.iter()) {
            d = field_of(&t, q)?.max(d);
            c = lcm(c, q.c).ok_or_else(overflow)?;
        }
        let lift = |q: &Quad| -> Result<(i128, i128)> {
            let k = c / q.c;
            Ok((q.a.checked_mul(k).ok_or_else(overflow)?, q.b.checked_mul(k).ok_or_else(overflow)?))
        };
        let zero = (0, 0);
        let one = (c, 0);
        let in_unit = |v: (i128, i128)| -> Result<bool> {
            Ok(sign(v.0 - zero.0, v.1, d)? != Ordering::Less && sign(v.0 - one.0, v.1, d)? == Ordering::Less)
        };
        let theta_l = lift(&t)?;
        if !in_unit(theta_l)? || sign(theta_l.0, theta_l.1, d)? == Ordering::Equal {
            return Err(LabError::InvalidSource("rotation angle must lie in (0, 1)".into()));
        }
        let state = lift(&p)?;
        if !in_unit(state)? {
            return Err(LabError::InvalidSource("phase must lie in [0, 1)".into()));
        }
        let cuts: Vec<(i128, i128)> = cuts.iter().map(lift).collect::<Result<_>>()?;
        for (j, &cut) in cuts.iter().enumerate() {
            if !in_unit(cut)? {
                return Err(LabError::InvalidSource(format!("cut point {j} is outside [0, 1)")));
            }
            if j > 0 {
                let prev = cuts[j - 1];
                if sign(cut.0 - prev.0, cut.1 - prev.1, d)? != Ordering::Greater {
                    return Err(LabError::InvalidSource("cut points must be strictly increasing".into()));
                }
            }
        }
        Ok(Self { d, c, theta: theta_l, state, cuts })
    }

    fn cell(&self, v: (i128, i128)) -> Result<u8> {
        let mut cell = self.cuts.len() - 1;
        for (j, cut) in self.cuts.iter().enumerate() {
            let x = v.0.checked_sub(cut.0).ok_or_else(overflow)?;
            let y = v.1.checked_sub(cut.1).ok_or_else(overflow)?;
            if sign(x, y, self.d)? == Ordering::Less {
                break;
            }
            cell = j;
        }
        Ok(cell as u8)
    }

    fn generate(&mut self, n: usize) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(n);
        let overflow_err = |_| {
            LabError::Precision(format!("exact rotation orbit of length {n} overflows 128-bit arithmetic"))
        };
        for _ in 0..n {
            out.push(self.cell(self.state).map_err(overflow_err)?);
            let a = self.state.0.checked_add(self.theta.0).ok_or_else(overflow).map_err(overflow_err)?;
            let b = self.state.1.checked_add(self.theta.1).ok_or_else(overflow).map_err(overflow_err)?;
            self.state = if sign(a - self.c, b, self.d).map_err(overflow_err)? != Ordering::Less {
                (a - self.c, b)
            } else {
                (a, b)
            };
        }
        Ok(out)
    }
}

/// Fixed-point orbit: every value is `v · 2^-128` with wrapping addition.
pub struct FixedOrbit {
    theta: u128,
    state: u128,
    cuts: Vec<u128>,
}

impl FixedOrbit {
    fn new(theta: &Real, phase: &Real, boundaries: &[Real]) -> Result<Self> {
        let theta = theta.to_fixed()?;
        if theta == 0 {
            return Err(LabError::InvalidSource("rotation angle must lie in (0, 1)".into()));
        }
        let state = phase.to_fixed()?;
        let cuts: Vec<u128> = boundaries.iter().map(Real::to_fixed).collect::<Result<_>>()?;
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::InvalidSource("cut points must be strictly increasing".into()));
        }
        Ok(Self { theta, state, cuts })
    }

    fn generate(&mut self, n: usize) -> Vec<u8> {
        let last = self.cuts.len() - 1;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let cell = match self.cuts.partition_point(|&c| c <= self.state) {
                0 => last,
                k => k - 1,
            };
            out.push(cell as u8);
            self.state = self.state.wrapping_add(self.theta);
        }
        out
    }
}
