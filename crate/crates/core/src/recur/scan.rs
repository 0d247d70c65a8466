use std::collections::HashMap;

use super::Recurrence;

const MERSENNE_61: u64 = (1 << 61) - 1;
const HASH_BASE: u64 = 0x1f3d_5b79_a2c4_e687 % MERSENNE_61;
const FILTER_BITS: u32 = 20;

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let lo = (p as u64) & MERSENNE_61;
    let hi = (p >> 61) as u64;
    let s = lo + hi;
    if s >= MERSENNE_61 { s - MERSENNE_61 } else { s }
}

#[inline]
fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MERSENNE_61 { s - MERSENNE_61 } else { s }
}

#[inline]
fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b { a - b } else { a + MERSENNE_61 - b }
}

/// Keys for all length-`n` blocks, computed from right to left.
///
/// When `n` symbols fit in 64 bits the key is the exact packed block;
/// otherwise it is a polynomial hash modulo `2^61 - 1`. Callers verify every
/// key hit by comparing symbols, so both forms give exact answers.
#[derive(Clone, Debug)]
pub struct BlockHasher {
    n: usize,
    packed: Option<(u32, u64)>,
    top: u64,
}

impl BlockHasher {
    pub fn new(n: usize, alphabet_size: usize) -> Self {
        let beta = crate::ceil_log2(alphabet_size as u64).max(1);
        let packed = (beta as usize * n <= 64).then(|| {
            let mask = if beta as usize * n == 64 { u64::MAX } else { (1u64 << (beta as usize * n)) - 1 };
            (beta, mask)
        });
        let mut top = 1;
        for _ in 1..n {
            top = mul_mod(top, HASH_BASE);
        }
        Self { n, packed, top }
    }

    /// Key of `x[p..p+n]` computed directly.
    pub fn key_at(&self, x: &[u8], p: usize) -> u64 {
        let mut key = 0;
        for q in (p..p + self.n).rev() {
            key = match self.packed {
                Some((beta, _)) => (key << beta) | x[q] as u64,
                None => add_mod(mul_mod(key, HASH_BASE), x[q] as u64 + 1),
            };
        }
        key
    }

    /// Key of `x[p..p+n]` given the key of `x[p+1..p+n+1]`, with `leaving`
    /// the symbol `x[p+n]`.
    #[inline]
    pub fn push_front(&self, next_key: u64, entering: u8, leaving: u8) -> u64 {
        match self.packed {
            Some((beta, mask)) => ((next_key << beta) | entering as u64) & mask,
            None => {
                let trimmed = sub_mod(next_key, mul_mod(leaving as u64 + 1, self.top));
                add_mod(entering as u64 + 1, mul_mod(trimmed, HASH_BASE))
            }
        }
    }
}

#[inline]
fn filter_slot(key: u64) -> usize {
    (key.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> (64 - FILTER_BITS)) as usize
}

/// Recurrence times of the length-`n` blocks at every position in `anchors`.
///
/// Symbols must be below `alphabet_size`. `lookback(i)` bounds the lag searched for anchor `i` and is clipped to
/// `i`. One right-to-left pass over `x` resolves every anchor, so the cost is
/// proportional to the largest lag examined plus the number of anchors.
/// Requires `anchors.end + n - 1 <= x.len()` and `n >= 1`.
pub fn recurrence_times(
    x: &[u8],
    alphabet_size: usize,
    n: usize,
    anchors: std::ops::Range<usize>,
    lookback: impl Fn(usize) -> usize,
) -> Vec<Recurrence> {
    assert!(n >= 1 && anchors.end + n <= x.len() + 1, "anchors out of range");
    let count = anchors.len();
    let mut out = vec![Recurrence::Censored; count];
    if count == 0 {
        return out;
    }
    let hasher = BlockHasher::new(n, alphabet_size);
    let limits: Vec<usize> = anchors.clone().map(|i| lookback(i).min(i)).collect();
    let floor = anchors
        .clone()
        .zip(&limits)
        .map(|(i, &l)| i - l)
        .min()
        .unwrap_or(0);

    let mut pending: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut filter = vec![0u64; 1 << (FILTER_BITS - 6)];
    let mut unresolved = 0usize;
    let last = anchors.end - 1;
    let mut key = hasher.key_at(x, last);
    let mut p = last;
    loop {
        let slot = filter_slot(key);
        if unresolved > 0 && filter[slot >> 6] & (1 << (slot & 63)) != 0 {
            if let Some(waiting) = pending.get_mut(&key) {
                waiting.retain(|&a| {
                    let lag = a - p;
                    if lag > limits[a - anchors.start] {
                        unresolved -= 1;
                        return false;
                    }
                    if x[p..p + n] == x[a..a + n] {
                        out[a - anchors.start] = Recurrence::Found(lag as u64);
                        unresolved -= 1;
                        return false;
                    }
                    true
                });
            }
        }
        if anchors.contains(&p) && limits[p - anchors.start] > 0 {
            pending.entry(key).or_default().push(p);
            filter[slot >> 6] |= 1 << (slot & 63);
            unresolved += 1;
        }
        if p == floor || (unresolved == 0 && p <= anchors.start) {
            break;
        }
        p -= 1;
        key = hasher.push_front(key, x[p], x[p + n]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[u8], i: usize, n: usize, lookback: usize) -> Recurrence {
        (1..=lookback.min(i))
            .find(|&l| x[i - l..i - l + n] == x[i..i + n])
            .map_or(Recurrence::Censored, |l| Recurrence::Found(l as u64))
    }

    #[test]
    fn rolling_keys_match_direct_keys() {
        let x: Vec<u8> = (0..200u32).map(|i| ((i * 7 + i / 3) % 5) as u8).collect();
        for n in [1, 3, 27, 28, 40] {
            let h = BlockHasher::new(n, 5);
            let mut key = h.key_at(&x, 150);
            for p in (0..150).rev() {
                key = h.push_front(key, x[p], x[p + n]);
                assert_eq!(key, h.key_at(&x, p), "n = {n}, p = {p}");
            }
        }
    }

    #[test]
    fn bulk_scan_matches_naive() {
        let x: Vec<u8> = (0..3000u64).map(|i| ((i.wrapping_mul(2654435761) >> 7) % 2) as u8).collect();
        for n in [1, 4, 9, 70] {
            let got = recurrence_times(&x, 2, n, 1000..1400, |_| 600);
            for (k, r) in got.iter().enumerate() {
                assert_eq!(*r, naive(&x, 1000 + k, n, 600), "n = {n}, i = {}", 1000 + k);
            }
        }
    }
}
