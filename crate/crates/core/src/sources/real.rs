//! Representations of rotation angles, phases and partition cut points.
//!
//! Two paths are supported. Exact quadratic irrationals `(a + b√d)/c` are
//! compared against each other with integer arithmetic only, so a rotation
//! orbit never drifts. Arbitrary reals use 128-bit fixed point, where
//! `frac(phase + i·θ)` is computed exactly modulo 2^128 and the only error
//! is the representation error of θ itself (at most `i·2^-128` after `i`
//! steps).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// A real number in a source description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Real {
    /// `(a + b·√d) / c`, with `d` a positive non-square when `b != 0`.
    Quadratic { a: i64, b: i64, d: u64, c: i64 },
    /// `num / den`.
    Rational { num: i64, den: i64 },
    /// Fixed-point fraction: the hex string is `value · 2^128`.
    Fixed(String),
    /// Converted to fixed point with 53 significant bits.
    Float(f64),
}

impl Real {
    /// `(√5 − 1)/2`, the golden-ratio rotation.
    pub fn golden() -> Self {
        Real::Quadratic { a: -1, b: 1, d: 5, c: 2 }
    }

    /// `√2 − 1`.
    pub fn silver() -> Self {
        Real::Quadratic { a: -1, b: 1, d: 2, c: 1 }
    }

    pub fn zero() -> Self {
        Real::Rational { num: 0, den: 1 }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Quadratic { .. } | Real::Rational { .. })
    }

    /// Exact quadratic form, when the value has one.
    pub fn to_quad(&self) -> Result<Option<Quad>> {
        match *self {
            Real::Quadratic { a, b, d, c } => Quad::new(a as i128, b as i128, d as i128, c as i128).map(Some),
            Real::Rational { num, den } => Quad::new(num as i128, 0, 0, den as i128).map(Some),
            _ => Ok(None),
        }
    }

    /// Fixed-point value `floor(value · 2^128)`; the value must lie in `[0, 1)`.
    pub fn to_fixed(&self) -> Result<u128> {
        match self {
            Real::Fixed(s) => {
                let digits = s.trim_start_matches("0x").trim_start_matches("0X");
                u128::from_str_radix(digits, 16)
                    .map_err(|e| LabError::InvalidSource(format!("bad fixed-point literal {s:?}: {e}")))
            }
            Real::Float(v) => {
                if !(0.0..1.0).contains(v) {
                    return Err(LabError::InvalidSource(format!("{v} is outside [0, 1)")));
                }
                Ok((v * 2f64.powi(128)) as u128)
            }
            Real::Rational { num, den } => rational_to_fixed(*num, *den),
            Real::Quadratic { .. } => Err(LabError::InvalidSource(
                "quadratic values cannot be mixed with a fixed-point angle".into(),
            )),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Quadratic { a, b, d, c } => (*a as f64 + *b as f64 * (*d as f64).sqrt()) / *c as f64,
            Real::Rational { num, den } => *num as f64 / *den as f64,
            Real::Fixed(_) => self.to_fixed().map(fixed_to_f64).unwrap_or(f64::NAN),
            Real::Float(v) => *v,
        }
    }
}

pub fn fixed_to_f64(v: u128) -> f64 {
    v as f64 * 2f64.powi(-128)
}

fn rational_to_fixed(num: i64, den: i64) -> Result<u128> {
    if den <= 0 || num < 0 || num >= den {
        return Err(LabError::InvalidSource(format!("{num}/{den} is outside [0, 1)")));
    }
    // Binary long division, one fraction bit per step.
    let (den, mut rem) = (den as u128, num as u128);
    let mut out = 0u128;
    for _ in 0..128 {
        rem <<= 1;
        out <<= 1;
        if rem >= den {
            rem -= den;
            out |= 1;
        }
    }
    Ok(out)
}

/// An exact element `(a + b√d)/c` of a real quadratic field, `c > 0`.
///
/// Rationals are stored with `b = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quad {
    pub a: i128,
    pub b: i128,
    pub d: i128,
    pub c: i128,
}

impl Quad {
    pub fn new(a: i128, b: i128, d: i128, c: i128) -> Result<Self> {
        if c == 0 {
            return Err(LabError::InvalidSource("zero denominator".into()));
        }
        let (a, b, c) = if c < 0 { (-a, -b, -c) } else { (a, b, c) };
        if b == 0 {
            return Ok(Quad { a, b: 0, d: 0, c });
        }
        if d <= 1 || is_square(d) {
            return Err(LabError::InvalidSource(format!("√{d} is not irrational")));
        }
        Ok(Quad { a, b, d, c })
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.d as f64).sqrt()) / self.c as f64
    }

    /// `floor(self)`, exactly.
    pub fn floor(&self) -> Result<i128> {
        let s = floor_mul_sqrt(self.b, self.d)?;
        let num = self.a.checked_add(s).ok_or_else(overflow)?;
        Ok(num.div_euclid(self.c))
    }

    /// Exact comparison with another element (rational or same field).
    pub fn cmp_exact(&self, other: &Quad) -> Result<Ordering> {
        let d = field_of(self, other)?;
        let x = self.a.checked_mul(other.c).zip(other.a.checked_mul(self.c));
        let y = self.b.checked_mul(other.c).zip(other.b.checked_mul(self.c));
        match (x, y) {
            (Some((x1, x2)), Some((y1, y2))) => {
                let x = x1.checked_sub(x2).ok_or_else(overflow)?;
                let y = y1.checked_sub(y2).ok_or_else(overflow)?;
                sign(x, y, d)
            }
            _ => Err(overflow()),
        }
    }
}

/// The common radicand of two elements, or an error if they live in
/// different quadratic fields.
pub fn field_of(p: &Quad, q: &Quad) -> Result<i128> {
    match (p.is_rational(), q.is_rational()) {
        (true, true) => Ok(0),
        (true, false) => Ok(q.d),
        (false, true) => Ok(p.d),
        (false, false) if p.d == q.d => Ok(p.d),
        _ => Err(LabError::InvalidSource(format!(
            "values from different fields √{} and √{}",
            p.d, q.d
        ))),
    }
}

pub(crate) fn overflow() -> LabError {
    LabError::Overflow("quadratic arithmetic exceeded 128 bits".into())
}

fn is_square(d: i128) -> bool {
    if d < 0 {
        return false;
    }
    let r = (d as u128).isqrt();
    r * r == d as u128
}

/// `floor(b·√d)` for a non-square `d` (or `b = 0`).
pub fn floor_mul_sqrt(b: i128, d: i128) -> Result<i128> {
    if b == 0 {
        return Ok(0);
    }
    let sq = b.checked_mul(b).and_then(|v| v.checked_mul(d)).ok_or_else(overflow)?;
    let r = (sq as u128).isqrt() as i128;
    // b√d is irrational, so for negative b the floor is one below -isqrt.
    Ok(if b > 0 { r } else { -r - 1 })
}

/// Sign of `x + y√d`, exactly. `d` must be non-square whenever `y != 0`.
#[inline]
pub fn sign(x: i128, y: i128, d: i128) -> Result<Ordering> {
    if y == 0 {
        return Ok(x.cmp(&0));
    }
    if x >= 0 && y > 0 {
        return Ok(Ordering::Greater);
    }
    if x <= 0 && y < 0 {
        return Ok(Ordering::Less);
    }
    let xx = x.checked_mul(x).ok_or_else(overflow)?;
    let yy = y.checked_mul(y).and_then(|v| v.checked_mul(d)).ok_or_else(overflow)?;
    // x and y have opposite signs and x² ≠ y²d for irrational √d.
    Ok(if x > 0 { xx.cmp(&yy) } else { yy.cmp(&xx) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_floor_and_order() {
        let g = Real::golden().to_quad().unwrap().unwrap();
        assert_eq!(g.floor().unwrap(), 0);
        let half = Quad::new(1, 0, 0, 2).unwrap();
        assert_eq!(g.cmp_exact(&half).unwrap(), Ordering::Greater);
        let five_eighths = Quad::new(5, 0, 0, 8).unwrap();
        assert_eq!(g.cmp_exact(&five_eighths).unwrap(), Ordering::Less);
    }

    #[test]
    fn negative_radical_floor() {
        // 3 - √5 ≈ 0.7639
        let q = Quad::new(3, -1, 5, 1).unwrap();
        assert_eq!(q.floor().unwrap(), 0);
        // -√2 ≈ -1.414
        let q = Quad::new(0, -1, 2, 1).unwrap();
        assert_eq!(q.floor().unwrap(), -2);
    }

    #[test]
    fn square_radicand_rejected() {
        assert!(Quad::new(0, 1, 4, 1).is_err());
    }

    #[test]
    fn sign_matches_float() {
        for x in -30i128..30 {
            for y in -30i128..30 {
                let exact = sign(x, y, 7).unwrap();
                let approx = x as f64 + y as f64 * 7f64.sqrt();
                if x == 0 && y == 0 {
                    assert_eq!(exact, Ordering::Equal);
                } else {
                    assert_eq!(exact, approx.partial_cmp(&0.0).unwrap(), "x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn rational_fixed_point() {
        assert_eq!(rational_to_fixed(1, 2).unwrap(), 1u128 << 127);
        assert_eq!(rational_to_fixed(1, 4).unwrap(), 1u128 << 126);
        assert!(rational_to_fixed(3, 2).is_err());
    }
}
