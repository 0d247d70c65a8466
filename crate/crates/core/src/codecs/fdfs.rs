use std::collections::HashMap;

use super::{
    degenerate_report, finish, ratio, read_literals, write_literals, BitStream, Codec, CompressionReport, Encoded,
    PhraseKind, PhraseRecord, TermBreakdown,
};
use crate::error::{LabError, Result};
use crate::recur::BlockHasher;
use crate::{ceil_log2, SymbolSeq};

fn check(database: &SymbolSeq, alphabet_size: usize, l_o: usize) -> Result<()> {
    if database.is_empty() {
        return Err(LabError::InvalidArgument("the fixed database is empty".into()));
    }
    if l_o == 0 {
        return Err(LabError::InvalidArgument("block length L_o must be at least 1".into()));
    }
    if database.alphabet_size() != alphabet_size {
        return Err(LabError::InvalidArgument(format!(
            "database alphabet {} differs from input alphabet {alphabet_size}",
            database.alphabet_size()
        )));
    }
    Ok(())
}

/// Start positions of every `l_o`-block of the database, grouped by key,
/// ascending within a group.
fn block_table(db: &[u8], l_o: usize, hasher: &BlockHasher) -> HashMap<u64, Vec<u32>> {
    let mut table: HashMap<u64, Vec<u32>> = HashMap::new();
    if l_o > db.len() {
        return table;
    }
    let last = db.len() - l_o;
    let mut keys = vec![0u64; last + 1];
    keys[last] = hasher.key_at(db, last);
    for p in (0..last).rev() {
        keys[p] = hasher.push_front(keys[p + 1], db[p], db[p + l_o]);
    }
    for (p, key) in keys.into_iter().enumerate() {
        table.entry(key).or_default().push(p as u32);
    }
    table
}

/// Fixed-database fixed-shift encoding of `seq` against `database`.
///
/// Blocks of `l_o` symbols are looked up as whole copies inside the
/// database (leftmost copy wins); unmatched blocks and the final
/// `N mod l_o` symbols are sent literally.
pub fn fdfs_encode(seq: &SymbolSeq, database: &SymbolSeq, l_o: usize) -> Result<Encoded> {
    let alphabet = seq.alphabet_size();
    check(database, alphabet, l_o)?;
    let (x, db) = (seq.symbols(), database.symbols());
    let n = x.len();
    let n_w = db.len();
    let beta = seq.beta();
    if beta == 0 {
        let report = degenerate_report(Codec::Fdfs, n, n_w, Some(l_o), beta);
        return Ok(Encoded { stream: BitStream::new(), report, records: Vec::new() });
    }
    let p_bits = ceil_log2(n_w as u64);
    let hasher = BlockHasher::new(l_o, alphabet);
    let table = block_table(db, l_o, &hasher);

    let mut out = BitStream::new();
    let mut terms = TermBreakdown::default();
    let mut records = Vec::new();
    let blocks = n / l_o;
    let (mut m1, mut m2) = (0, 0);
    let matched_cost = p_bits as u64 + 1;
    let literal_cost = beta as u64 * l_o as u64 + 1;
    for b in 0..blocks {
        let start = b * l_o;
        let block = &x[start..start + l_o];
        let found = table
            .get(&hasher.key_at(x, start))
            .and_then(|ps| ps.iter().map(|&p| p as usize).find(|&p| &db[p..p + l_o] == block));
        terms.flags += 1;
        match found {
            Some(p) => {
                out.push_bit(true);
                out.push_bits(p as u64, p_bits);
                terms.pointers += p_bits as u64;
                m1 += 1;
                records.push(PhraseRecord {
                    kind: PhraseKind::Matched,
                    start,
                    offset: p + 1,
                    length: l_o,
                    match_len: l_o,
                    bits_used: matched_cost,
                    rejected_bits: Some(literal_cost),
                    chosen_bits: matched_cost,
                });
            }
            None => {
                out.push_bit(false);
                write_literals(&mut out, block, beta);
                terms.literals += literal_cost - 1;
                m2 += 1;
                records.push(PhraseRecord {
                    kind: PhraseKind::Literal,
                    start,
                    offset: 0,
                    length: l_o,
                    match_len: 0,
                    bits_used: literal_cost,
                    rejected_bits: None,
                    chosen_bits: literal_cost,
                });
            }
        }
    }
    let tail = &x[blocks * l_o..];
    write_literals(&mut out, tail, beta);
    terms.tail = tail.len() as u64 * beta as u64;

    let formula_bits = (m1 as u64 * (p_bits as u64 + 1)
        + m2 as u64 * (beta as u64 * l_o as u64 + 1)
        + beta as u64 * (n - l_o * blocks) as u64) as f64;
    let payload_bits = out.len_bits();
    let report = CompressionReport {
        codec: Codec::Fdfs,
        n,
        n_w,
        l_o: Some(l_o),
        m: blocks,
        m1,
        m2,
        phrases: blocks,
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

/// Inverse of [`fdfs_encode`] for an input of `n` symbols over
/// `alphabet_size` symbols.
pub fn fdfs_decode(stream: &BitStream, database: &SymbolSeq, l_o: usize, n: usize, alphabet_size: usize) -> Result<SymbolSeq> {
    check(database, alphabet_size, l_o)?;
    let db = database.symbols();
    let beta = ceil_log2(alphabet_size as u64);
    if beta == 0 {
        return SymbolSeq::new(vec![0; n], alphabet_size);
    }
    let p_bits = ceil_log2(db.len() as u64);
    let mut r = stream.reader();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n / l_o {
        if r.read_bit()? {
            let p = r.read_bits(p_bits)? as usize;
            if p + l_o > db.len() {
                return Err(LabError::Corrupt(format!("database position {p} leaves no room for a block")));
            }
            out.extend_from_slice(&db[p..p + l_o]);
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
    fn periodic_against_periodic_database() {
        let x = gen(&SourceSpec::periodic(&[0, 1]), 40, 0).unwrap();
        let db = gen(&SourceSpec::periodic(&[0, 1]), 8, 0).unwrap();
        let enc = fdfs_encode(&x, &db, 4).unwrap();
        assert_eq!((enc.report.m1, enc.report.m2), (10, 0));
        assert_eq!(enc.report.payload_bits, 40);
        assert_eq!(enc.report.formula_bits, 40.0);
        assert_eq!(enc.report.actual_ratio, 1.0);
        enc.report.check(&enc.records).unwrap();
        assert_eq!(fdfs_decode(&enc.stream, &db, 4, 40, 2).unwrap(), x.slice(0..40));
    }

    #[test]
    fn mismatched_database_sends_literals() {
        let x = SymbolSeq::new((0..=9).collect(), 16).unwrap();
        let db = SymbolSeq::new(vec![15; 8], 16).unwrap();
        let enc = fdfs_encode(&x, &db, 3).unwrap();
        assert_eq!((enc.report.m1, enc.report.m2), (0, 3));
        assert_eq!(enc.report.payload_bits, 3 * (4 * 3 + 1) + 4);
        assert_eq!(fdfs_decode(&enc.stream, &db, 3, 10, 16).unwrap(), x.slice(0..10));
    }

    #[test]
    fn block_longer_than_input_is_all_tail() {
        let x = SymbolSeq::new(vec![1, 0, 1], 2).unwrap();
        let db = SymbolSeq::new(vec![1, 0, 1, 1], 2).unwrap();
        let enc = fdfs_encode(&x, &db, 5).unwrap();
        assert_eq!(enc.report.m, 0);
        assert_eq!(enc.report.terms.tail, 3);
        assert_eq!(fdfs_decode(&enc.stream, &db, 5, 3, 2).unwrap(), x.slice(0..3));
    }

    #[test]
    fn empty_database_errors() {
        let x = SymbolSeq::new(vec![1, 0, 1], 2).unwrap();
        let db = SymbolSeq::new(vec![], 2).unwrap();
        assert!(fdfs_encode(&x, &db, 2).is_err());
    }
}
