use std::collections::HashMap;
use std::io::Write;

use crate::error::{LabError, Result};
use crate::SymbolSeq;

/// One LZ-78 phrase: a previously seen phrase extended by one symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lz78Phrase {
    pub start: usize,
    pub length: usize,
    /// Index of the phrase this one extends, `None` for single symbols.
    pub parent: Option<usize>,
    pub symbol: u8,
}

/// Greedy incremental parse of a sequence.
///
/// If the data ends inside a match, the leftover segment repeats an
/// existing phrase; it is kept as `tail` (its start, length and the phrase
/// it equals) and counted in [`c`](Self::c).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lz78Parse {
    pub phrases: Vec<Lz78Phrase>,
    pub tail: Option<(usize, usize, usize)>,
}

impl Lz78Parse {
    /// Number of phrases `c(N)`, including an incomplete final phrase.
    pub fn c(&self) -> usize {
        self.phrases.len() + usize::from(self.tail.is_some())
    }

    /// The phrases as symbol strings.
    pub fn words(&self, x: &[u8]) -> Vec<Vec<u8>> {
        let mut out: Vec<Vec<u8>> = self.phrases.iter().map(|p| x[p.start..p.start + p.length].to_vec()).collect();
        if let Some((start, len, _)) = self.tail {
            out.push(x[start..start + len].to_vec());
        }
        out
    }

    /// CSV with columns `phrase,start,length,parent,symbol,word,complete`;
    /// `parent` is empty for single-symbol phrases and `word` spells the
    /// phrase (digits run together for alphabets up to 10 symbols,
    /// space-separated otherwise).
    pub fn write_csv<W: Write>(&self, w: W, x: &[u8]) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["phrase", "start", "length", "parent", "symbol", "word", "complete"])?;
        for (j, p) in self.phrases.iter().enumerate() {
            out.write_record([
                j.to_string(),
                p.start.to_string(),
                p.length.to_string(),
                p.parent.map_or(String::new(), |q| q.to_string()),
                p.symbol.to_string(),
                spell(&x[p.start..p.start + p.length]),
                "1".into(),
            ])?;
        }
        if let Some((start, len, equals)) = self.tail {
            let parent = self.phrases[equals].parent;
            out.write_record([
                self.phrases.len().to_string(),
                start.to_string(),
                len.to_string(),
                parent.map_or(String::new(), |q| q.to_string()),
                x[start + len - 1].to_string(),
                spell(&x[start..start + len]),
                "0".into(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn spell(word: &[u8]) -> String {
    let sep = if word.iter().all(|&s| s < 10) { "" } else { " " };
    word.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(sep)
}

/// LZ-78 parsing: each new phrase is the shortest string whose prefix
/// without its last symbol is an earlier phrase.
pub fn lz78_parse(seq: &SymbolSeq) -> Result<Lz78Parse> {
    let x = seq.symbols();
    if x.is_empty() {
        return Err(LabError::EmptySequence);
    }
    let mut children: HashMap<(u32, u8), u32> = HashMap::new();
    let mut phrases = Vec::new();
    let mut pos = 0;
    while pos < x.len() {
        // Node 0 is the root; node j + 1 is phrase j.
        let mut node = 0u32;
        let mut len = 0;
        while pos + len < x.len() {
            match children.get(&(node, x[pos + len])) {
                Some(&next) => {
                    node = next;
                    len += 1;
                }
                None => break,
            }
        }
        if pos + len == x.len() {
            return Ok(Lz78Parse { phrases, tail: Some((pos, len, node as usize - 1)) });
        }
        let symbol = x[pos + len];
        children.insert((node, symbol), phrases.len() as u32 + 1);
        phrases.push(Lz78Phrase {
            start: pos,
            length: len + 1,
            parent: node.checked_sub(1).map(|p| p as usize),
            symbol,
        });
        pos += len + 1;
    }
    Ok(Lz78Parse { phrases, tail: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(symbols: &[u8]) -> Vec<String> {
        let seq = SymbolSeq::new(symbols.to_vec(), 2).unwrap();
        let parse = lz78_parse(&seq).unwrap();
        parse.words(symbols).iter().map(|w| w.iter().map(|s| char::from(b'0' + s)).collect()).collect()
    }

    #[test]
    fn alternating_trace() {
        let x: Vec<u8> = (0..30).map(|i| (i % 2) as u8).collect();
        let got = words(&x);
        let want = ["0", "1", "01", "010", "10", "101", "0101", "01010", "1010", "10101"];
        assert_eq!(got, want);
    }

    #[test]
    fn unary_triangle() {
        let parse = lz78_parse(&SymbolSeq::new(vec![0; 10], 1).unwrap()).unwrap();
        assert_eq!(parse.c(), 4);
        assert_eq!(parse.phrases.iter().map(|p| p.length).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert!(parse.tail.is_none());
    }

    #[test]
    fn incomplete_final_phrase() {
        let parse = lz78_parse(&SymbolSeq::new(vec![0; 12], 1).unwrap()).unwrap();
        assert_eq!(parse.c(), 5);
        assert_eq!(parse.tail, Some((10, 2, 1)));
    }

    #[test]
    fn empty_input_rejected() {
        assert!(lz78_parse(&SymbolSeq::new(vec![], 2).unwrap()).is_err());
    }
}
