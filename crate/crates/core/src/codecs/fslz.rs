use super::{
    degenerate_report, finish, ratio, read_literals, write_literals, BitStream, Codec, CompressionReport, Encoded,
    PhraseKind, PhraseRecord, TermBreakdown,
};
use crate::error::{LabError, Result};
use crate::recur::MatchIndex;
use crate::{ceil_log2, SymbolSeq};

/// Fixed-shift encoding with an `n_w`-symbol sliding window and blocks of
/// `l_o` symbols.
///
/// A block starting at `pos` is matched when a copy of it begins in
/// `[pos - n_w, pos)`; the copy may run into the block itself.
pub fn fslz_encode(seq: &SymbolSeq, n_w: usize, l_o: usize) -> Result<Encoded> {
    if n_w == 0 || l_o == 0 {
        return Err(LabError::InvalidArgument("window size and block length must be positive".into()));
    }
    let x = seq.symbols();
    let n = x.len();
    let beta = seq.beta();
    if n <= n_w || beta == 0 {
        let report = degenerate_report(Codec::Fslz, n, n_w, Some(l_o), beta);
        let mut stream = BitStream::new();
        write_literals(&mut stream, x, beta);
        return Ok(Encoded { stream, report, records: Vec::new() });
    }
    let p_bits = ceil_log2(n_w as u64);
    let gram = MatchIndex::default_gram(seq.alphabet_size(), n_w).min(l_o);
    let index = MatchIndex::with_gram(x, seq.alphabet_size(), gram);

    let mut out = BitStream::new();
    write_literals(&mut out, &x[..n_w], beta);
    let mut terms = TermBreakdown { window: n_w as u64 * beta as u64, ..TermBreakdown::default() };
    let mut records = Vec::new();
    let (mut m1, mut m2) = (0usize, 0usize);
    let matched_cost = p_bits as u64 + 1;
    let literal_cost = beta as u64 * l_o as u64 + 1;
    let mut pos = n_w;
    while pos + l_o <= n {
        let window = pos - n_w;
        let found = index.longest_match(pos, window, n_w, l_o, true);
        terms.flags += 1;
        if found.length == l_o {
            out.push_bit(true);
            out.push_bits((found.offset - window) as u64, p_bits);
            terms.pointers += p_bits as u64;
            m1 += 1;
            records.push(PhraseRecord {
                kind: PhraseKind::Matched,
                start: pos,
                offset: found.offset - window + 1,
                length: l_o,
                match_len: l_o,
                bits_used: matched_cost,
                rejected_bits: Some(literal_cost),
                chosen_bits: matched_cost,
            });
        } else {
            out.push_bit(false);
            write_literals(&mut out, &x[pos..pos + l_o], beta);
            terms.literals += literal_cost - 1;
            m2 += 1;
            records.push(PhraseRecord {
                kind: PhraseKind::Literal,
                start: pos,
                offset: 0,
                length: l_o,
                match_len: found.length,
                bits_used: literal_cost,
                rejected_bits: None,
                chosen_bits: literal_cost,
            });
        }
        pos += l_o;
    }
    write_literals(&mut out, &x[pos..], beta);
    terms.tail = (n - pos) as u64 * beta as u64;

    let m = m1 + m2;
    let formula_bits = ((n - m * l_o) as u64 * beta as u64
        + m1 as u64 * p_bits as u64
        + m2 as u64 * beta as u64 * l_o as u64
        + m as u64) as f64;
    let payload_bits = out.len_bits();
    let report = CompressionReport {
        codec: Codec::Fslz,
        n,
        n_w,
        l_o: Some(l_o),
        m,
        m1,
        m2,
        phrases: m,
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

/// Inverse of [`fslz_encode`].
pub fn fslz_decode(stream: &BitStream, n_w: usize, l_o: usize, n: usize, alphabet_size: usize) -> Result<SymbolSeq> {
    if n_w == 0 || l_o == 0 {
        return Err(LabError::InvalidArgument("window size and block length must be positive".into()));
    }
    let beta = ceil_log2(alphabet_size as u64);
    let mut r = stream.reader();
    let mut out = Vec::with_capacity(n);
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
    while out.len() + l_o <= n {
        let pos = out.len();
        if r.read_bit()? {
            let offset = r.read_bits(p_bits)? as usize;
            if offset >= n_w {
                return Err(LabError::Corrupt(format!("window offset {offset} outside a window of {n_w}")));
            }
            let src = pos - n_w + offset;
            for k in 0..l_o {
                let s = out[src + k];
                out.push(s);
            }
        } else {
            read_literals(&mut r, l_o, beta, alphabet_size, &mut out)?;
        }
    }
    read_literals(&mut r, n - out.len(), beta, alphabet_size, &mut out)?;
    finish(stream, &r)?;
    SymbolSeq::new(out, alphabet_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{gen, SourceSpec};

    #[test]
    fn periodic_blocks_all_match() {
        let x = gen(&SourceSpec::periodic(&[0, 1]), 1000, 0).unwrap();
        let enc = fslz_encode(&x, 4, 8).unwrap();
        assert_eq!(enc.report.m2, 0);
        assert_eq!(enc.report.m, (1000 - 4) / 8);
        enc.report.check(&enc.records).unwrap();
        assert_eq!(enc.report.payload_bits as f64, enc.report.formula_bits);
        assert_eq!(fslz_decode(&enc.stream, 4, 8, 1000, 2).unwrap(), x.slice(0..1000));
    }

    #[test]
    fn short_input_is_degenerate() {
        let x = SymbolSeq::new(vec![0, 1, 1], 2).unwrap();
        let enc = fslz_encode(&x, 4, 2).unwrap();
        assert!(enc.report.degenerate);
        assert_eq!(enc.report.payload_bits, 3);
        assert_eq!(fslz_decode(&enc.stream, 4, 2, 3, 2).unwrap(), x.slice(0..3));
    }
}
