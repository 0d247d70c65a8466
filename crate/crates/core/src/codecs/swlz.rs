use super::intcode::{gamma_len, read_gamma, write_gamma};
use super::{
    degenerate_report, finish, ratio, read_literals, write_literals, BitStream, Codec, CompressionReport, Encoded,
    PhraseKind, PhraseRecord, TermBreakdown,
};
use crate::error::{LabError, Result};
use crate::recur::MatchIndex;
use crate::{ceil_log2, SymbolSeq};

/// Constant of the Elias-gamma code in the `γ log2(L + 1)` length cost.
pub const ELIAS_GAMMA: f64 = 2.0;

/// Sliding-window encoding with greedy longest matches.
///
/// At each position the longest copy starting in the previous `n_w`
/// symbols is found (overlap allowed). It is sent as (offset, gamma length)
/// when that costs no more than `β·L` bits, and otherwise the match plus the
/// symbol breaking it is sent literally. `gamma` is the constant used in the
/// report's formula value; the emitted code is always Elias gamma.
pub fn swlz_encode(seq: &SymbolSeq, n_w: usize, gamma: f64) -> Result<Encoded> {
    if n_w == 0 {
        return Err(LabError::InvalidArgument("window size must be positive".into()));
    }
    if !(gamma > 0.0) {
        return Err(LabError::InvalidArgument(format!("formula constant gamma = {gamma} must be positive")));
    }
    let x = seq.symbols();
    let n = x.len();
    let beta = seq.beta();
    if n <= n_w || beta == 0 {
        let report = degenerate_report(Codec::Swlz, n, n_w, None, beta);
        let mut stream = BitStream::new();
        write_literals(&mut stream, x, beta);
        return Ok(Encoded { stream, report, records: Vec::new() });
    }
    let p_bits = ceil_log2(n_w as u64);
    let index = MatchIndex::new(x, seq.alphabet_size(), n_w);

    let mut out = BitStream::new();
    write_literals(&mut out, &x[..n_w], beta);
    let mut terms = TermBreakdown { window: n_w as u64 * beta as u64, ..TermBreakdown::default() };
    let mut records = Vec::new();
    let mut formula_bits = (n_w as u64 * beta as u64) as f64;
    let mut pos = n_w;
    while pos < n {
        let window = pos - n_w;
        let found = index.longest_match(pos, window, n_w, n - pos, true);
        let l = found.length;
        let pointer_cost = (l >= 1).then(|| 1 + p_bits as u64 + gamma_len(l as u64) as u64);
        let literal_cost_l = 1 + beta as u64 * l as u64;
        let record = match pointer_cost {
            Some(cost) if cost <= literal_cost_l => {
                out.push_bit(true);
                out.push_bits((found.offset - window) as u64, p_bits);
                write_gamma(&mut out, l as u64)?;
                terms.pointers += p_bits as u64;
                terms.lengths += gamma_len(l as u64) as u64;
                PhraseRecord {
                    kind: PhraseKind::Matched,
                    start: pos,
                    offset: found.offset - window + 1,
                    length: l,
                    match_len: l,
                    bits_used: cost,
                    rejected_bits: Some(literal_cost_l),
                    chosen_bits: cost,
                }
            }
            _ => {
                let len = (l + 1).min(n - pos);
                out.push_bit(false);
                write_literals(&mut out, &x[pos..pos + len], beta);
                terms.literals += beta as u64 * len as u64;
                PhraseRecord {
                    kind: PhraseKind::Literal,
                    start: pos,
                    offset: 0,
                    length: len,
                    match_len: l,
                    bits_used: 1 + beta as u64 * len as u64,
                    rejected_bits: pointer_cost,
                    chosen_bits: literal_cost_l,
                }
            }
        };
        terms.flags += 1;
        let len = record.length as f64;
        formula_bits += (gamma * (len + 1.0).log2() + p_bits as f64).min(beta as f64 * len) + 1.0;
        pos += record.length;
        records.push(record);
    }

    let payload_bits = out.len_bits();
    let report = CompressionReport {
        codec: Codec::Swlz,
        n,
        n_w,
        l_o: None,
        m: 0,
        m1: 0,
        m2: 0,
        phrases: records.len(),
        beta,
        header_bits: super::container::HEADER_BITS,
        payload_bits,
        terms,
        formula_bits,
        formula_ratio: ratio(formula_bits, n),
        actual_ratio: ratio(payload_bits as f64, n),
        degenerate: false,
    };
    Ok(Encoded { stream: out, report, records })
}

/// Inverse of [`swlz_encode`].
pub fn swlz_decode(stream: &BitStream, n_w: usize, n: usize, alphabet_size: usize) -> Result<SymbolSeq> {
    if n_w == 0 {
        return Err(LabError::InvalidArgument("window size must be positive".into()));
    }
    let beta = ceil_log2(alphabet_size as u64);
    let mut r = stream.reader();
    let mut out: Vec<u8> = Vec::with_capacity(n);
    if n <= n_w || beta == 0 {
        if beta == 0 {
            out.resize(n, 0);
        } else {
            read_literals(&mut r, n, beta, alphabet_size, &mut out)?;
        }
        finish(stream, &r)?;
        return SymbolSeq::new(out, alphabet_size);
    }
    let p_bits = ceil_log2(n_w as u64);
    read_literals(&mut r, n_w, beta, alphabet_size, &mut out)?;
    let mut candidates: Vec<usize> = Vec::with_capacity(n_w);
    while out.len() < n {
        let pos = out.len();
        let window = pos - n_w;
        if r.read_bit()? {
            let offset = r.read_bits(p_bits)? as usize;
            let l = read_gamma(&mut r)? as usize;
            if offset >= n_w || l > n - pos {
                return Err(LabError::Corrupt(format!("copy ({offset}, {l}) does not fit at position {pos}")));
            }
            for k in 0..l {
                let s = out[window + offset + k];
                out.push(s);
            }
        } else {
            read_literals(&mut r, 1, beta, alphabet_size, &mut out)?;
            candidates.clear();
            candidates.extend((window..pos).filter(|&s| out[s] == out[pos]));
            while !candidates.is_empty() && out.len() < n {
                read_literals(&mut r, 1, beta, alphabet_size, &mut out)?;
                let t = out.len() - 1 - pos;
                let sym = out[pos + t];
                candidates.retain(|&s| out[s + t] == sym);
            }
        }
    }
    finish(stream, &r)?;
    SymbolSeq::new(out, alphabet_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{gen, SourceSpec};

    #[test]
    fn periodic_single_phrase() {
        let n = 1 << 16;
        let x = gen(&SourceSpec::periodic(&[0, 1]), n, 0).unwrap();
        let enc = swlz_encode(&x, 2, ELIAS_GAMMA).unwrap();
        assert_eq!(enc.records.len(), 1);
        // flag + 1 pointer bit + gamma(2^16 - 2) = 1 + 1 + 31
        assert_eq!(enc.report.payload_bits, 2 + 33);
        enc.report.check(&enc.records).unwrap();
        assert_eq!(swlz_decode(&enc.stream, 2, n, 2).unwrap(), x.slice(0..n));
    }

    #[test]
    fn literal_phrase_includes_breaking_symbol() {
        let x = SymbolSeq::new(vec![0, 1, 1, 0, 0, 0, 1, 1, 1, 0], 2).unwrap();
        for n_w in 1..9 {
            let enc = swlz_encode(&x, n_w, ELIAS_GAMMA).unwrap();
            enc.report.check(&enc.records).unwrap();
            for rec in &enc.records {
                if rec.kind == PhraseKind::Literal {
                    assert!(rec.length == rec.match_len + 1 || rec.start + rec.length == x.len());
                }
                if let Some(rejected) = rec.rejected_bits {
                    assert!(rec.chosen_bits <= rejected);
                }
            }
            assert_eq!(swlz_decode(&enc.stream, n_w, x.len(), 2).unwrap(), x.slice(0..x.len()), "n_w = {n_w}");
        }
    }

    #[test]
    fn single_symbol_alphabet_is_free() {
        let x = SymbolSeq::new(vec![0; 50], 1).unwrap();
        let enc = swlz_encode(&x, 4, ELIAS_GAMMA).unwrap();
        assert!(enc.report.degenerate);
        assert_eq!(enc.report.payload_bits, 0);
        assert_eq!(swlz_decode(&enc.stream, 4, 50, 1).unwrap(), x.slice(0..50));
    }
}
