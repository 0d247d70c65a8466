//! Continued fraction expansion of a quadratic irrational and the
//! `i·‖iθ‖` diagnostic for the irrationality exponent η(θ).

use super::real::{floor_mul_sqrt, overflow, Quad};
use crate::error::{LabError, Result};

pub const MAX_DEPTH: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct CfExpansion {
    /// `a_0 = ⌊θ⌋` (0 for θ in (0, 1)).
    pub integer_part: i128,
    /// `a_1, …, a_k`.
    pub partial_quotients: Vec<i128>,
    /// `(p_j, q_j)` for `j = 1..=k`.
    pub convergents: Vec<(i128, i128)>,
    /// Record lows `(i, i·‖iθ‖)` of the exhaustive scan over `1..=i_max`.
    pub residual_stat: Vec<(u64, f64)>,
    /// `min_{i ≤ i_max} i·‖iθ‖`.
    pub min_residual: f64,
}

/// Expand θ to depth `k` and scan `i·‖iθ‖` for `i ≤ i_max`.
pub fn cf_expand(theta: &Quad, k: usize, i_max: u64) -> Result<CfExpansion> {
    if k > MAX_DEPTH {
        return Err(LabError::Depth(k));
    }
    if theta.is_rational() {
        return Err(LabError::InvalidArgument("continued fraction needs an irrational θ".into()));
    }
    let (integer_part, partial_quotients) = partial_quotients(theta, k)?;
    let mut convergents = Vec::with_capacity(k);
    let (mut p2, mut p1) = (1i128, integer_part);
    let (mut q2, mut q1) = (0i128, 1i128);
    for &a in &partial_quotients {
        let p = a.checked_mul(p1).and_then(|v| v.checked_add(p2)).ok_or_else(overflow)?;
        let q = a.checked_mul(q1).and_then(|v| v.checked_add(q2)).ok_or_else(overflow)?;
        convergents.push((p, q));
        (p2, p1) = (p1, p);
        (q2, q1) = (q1, q);
    }
    let (residual_stat, min_residual) = residual_scan(theta, i_max)?;
    Ok(CfExpansion { integer_part, partial_quotients, convergents, residual_stat, min_residual })
}

/// `a_0` and `a_1..a_k` via the `(P + √D)/Q` recurrence, exact throughout.
fn partial_quotients(theta: &Quad, k: usize) -> Result<(i128, Vec<i128>)> {
    // (a + b√d)/c = (P + √D)/Q with D = b²d, sign of b folded into P, Q.
    let big_d = theta.b.checked_mul(theta.b).and_then(|v| v.checked_mul(theta.d)).ok_or_else(overflow)?;
    let (mut p, mut q) = if theta.b > 0 { (theta.a, theta.c) } else { (-theta.a, -theta.c) };
    let mut big_d = big_d;
    if (big_d - p * p) % q != 0 {
        let s = q.abs();
        p = p.checked_mul(s).ok_or_else(overflow)?;
        q = q.checked_mul(s).ok_or_else(overflow)?;
        big_d = big_d.checked_mul(s * s).ok_or_else(overflow)?;
    }
    let root = (big_d as u128).isqrt() as i128;
    let mut next = || -> Result<i128> {
        // floor((P + √D)/Q); √D is irrational so ceil = floor + 1.
        let a = if q > 0 {
            (p + root).div_euclid(q)
        } else {
            -((p + root).div_euclid(-q) + 1)
        };
        let p_next = a.checked_mul(q).ok_or_else(overflow)? - p;
        let q_next = (big_d - p_next.checked_mul(p_next).ok_or_else(overflow)?) / q;
        p = p_next;
        q = q_next;
        Ok(a)
    };
    let a0 = next()?;
    let rest = (0..k).map(|_| next()).collect::<Result<Vec<_>>>()?;
    Ok((a0, rest))
}

/// Exhaustive `i·‖iθ‖` scan. The residual `iθ − nearest` is
/// `(X + Y√d)/c`; it is evaluated as `(X² − Y²d) / (c(X − Y√d))` so the
/// cancellation happens in exact integers.
fn residual_scan(theta: &Quad, i_max: u64) -> Result<(Vec<(u64, f64)>, f64)> {
    let sqrt_d = (theta.d as f64).sqrt();
    let mut records = Vec::new();
    let mut best = f64::INFINITY;
    for i in 1..=i_max as i128 {
        let x0 = theta.a.checked_mul(i).ok_or_else(overflow)?;
        let y = theta.b.checked_mul(i).ok_or_else(overflow)?;
        // nearest = floor(iθ + 1/2) = floor((2X0 + c + 2Y√d) / 2c)
        let s = floor_mul_sqrt(2 * y, theta.d)?;
        let nearest = (2 * x0 + theta.c + s).div_euclid(2 * theta.c);
        let x = x0 - nearest * theta.c;
        let num = x.checked_mul(x).ok_or_else(overflow)? - y.checked_mul(y).ok_or_else(overflow)? * theta.d;
        let den = theta.c as f64 * (x as f64 - y as f64 * sqrt_d);
        let dist = (num as f64 / den).abs();
        let v = i as f64 * dist;
        if v < best {
            best = v;
            records.push((i as u64, v));
        }
    }
    Ok((records, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::real::Real;

    #[test]
    fn golden_all_ones() {
        let g = Real::golden().to_quad().unwrap().unwrap();
        let cf = cf_expand(&g, 10, 10).unwrap();
        assert_eq!(cf.integer_part, 0);
        assert_eq!(cf.partial_quotients, vec![1; 10]);
        assert_eq!(cf.convergents[9], (55, 89));
    }

    #[test]
    fn silver_all_twos() {
        let s = Real::silver().to_quad().unwrap().unwrap();
        let cf = cf_expand(&s, 10, 10).unwrap();
        assert_eq!(cf.partial_quotients, vec![2; 10]);
        assert_eq!(cf.convergents[0], (1, 2));
        assert_eq!(cf.convergents[1], (2, 5));
    }

    #[test]
    fn sqrt3_periodic_pattern() {
        // √3 − 1 = [0; 1, 2, 1, 2, ...]
        let s = Quad::new(-1, 1, 3, 1).unwrap();
        let cf = cf_expand(&s, 6, 1).unwrap();
        assert_eq!(cf.partial_quotients, vec![1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn depth_guard() {
        let g = Real::golden().to_quad().unwrap().unwrap();
        assert!(matches!(cf_expand(&g, 65, 1), Err(LabError::Depth(65))));
        assert!(cf_expand(&g, 64, 1).is_ok());
    }

    #[test]
    fn convergent_recurrence_and_coprime() {
        let g = Real::golden().to_quad().unwrap().unwrap();
        let cf = cf_expand(&g, 64, 1).unwrap();
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        for j in 2..cf.convergents.len() {
            let a = cf.partial_quotients[j];
            let (p, q) = cf.convergents[j];
            let (p1, q1) = cf.convergents[j - 1];
            let (p2, q2) = cf.convergents[j - 2];
            assert_eq!(p, a * p1 + p2);
            assert_eq!(q, a * q1 + q2);
        }
        for &(p, q) in &cf.convergents {
            assert_eq!(gcd(p, q), 1);
        }
    }
}
