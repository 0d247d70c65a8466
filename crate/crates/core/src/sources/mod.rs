//! Sequence sources and their ground-truth diagnostics.

pub mod cf;
pub mod markov;
pub mod real;
pub mod rotation;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::rng::{cumulative, SeededStream};
pub use cf::{cf_expand, CfExpansion};
pub use real::{Quad, Real};
use rotation::RotationCoder;

const PROB_TOL: f64 = 1e-12;

/// Declarative description of a source.
///
/// Serialized as a table tagged by `kind`, e.g.
///
/// ```toml
/// kind = "rotation"
/// theta = { quadratic = { a = -1, b = 1, d = 5, c = 2 } }
/// phase = { rational = { num = 0, den = 1 } }
/// ```
///
/// A rotation without `boundaries` uses the Sturmian partition `{0, θ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceSpec {
    Periodic {
        pattern: Vec<u8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet_size: Option<u16>,
    },
    Iid {
        probs: Vec<f64>,
    },
    Markov {
        trans: Vec<Vec<f64>>,
        init: Vec<f64>,
    },
    Rotation {
        theta: Real,
        phase: Real,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        boundaries: Option<Vec<Real>>,
    },
    Morphic {
        /// `rules[s]` is the image of symbol `s`.
        rules: Vec<Vec<u8>>,
        axiom: u8,
    },
}

/// Family of a source, used for labels and dispatch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Periodic,
    Iid,
    Markov,
    Rotation,
    Morphic,
}

impl SourceKind {
    pub fn name(self) -> &'static str {
        match self {
            SourceKind::Periodic => "periodic",
            SourceKind::Iid => "iid",
            SourceKind::Markov => "markov",
            SourceKind::Rotation => "rotation",
            SourceKind::Morphic => "morphic",
        }
    }
}

impl SourceSpec {
    pub fn periodic(pattern: &[u8]) -> Self {
        SourceSpec::Periodic { pattern: pattern.to_vec(), alphabet_size: None }
    }

    pub fn iid(probs: &[f64]) -> Self {
        SourceSpec::Iid { probs: probs.to_vec() }
    }

    pub fn fair_coin() -> Self {
        Self::iid(&[0.5, 0.5])
    }

    /// Two-state chain that flips with probability `flip`, started stationary.
    pub fn symmetric_markov(flip: f64) -> Self {
        SourceSpec::Markov {
            trans: vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]],
            init: vec![0.5, 0.5],
        }
    }

    /// Sturmian coding of the rotation by θ with cut points `{0, θ}`.
    pub fn sturmian(theta: Real, phase: Real) -> Self {
        SourceSpec::Rotation { theta, phase, boundaries: None }
    }

    /// Sturmian word of the golden rotation with phase 0.
    pub fn golden_sturmian() -> Self {
        Self::sturmian(Real::golden(), Real::zero())
    }

    /// Fibonacci substitution `0 → 01, 1 → 0` from axiom 0.
    pub fn fibonacci() -> Self {
        SourceSpec::Morphic { rules: vec![vec![0, 1], vec![0]], axiom: 0 }
    }

    pub fn kind(&self) -> SourceKind {
        match self {
            SourceSpec::Periodic { .. } => SourceKind::Periodic,
            SourceSpec::Iid { .. } => SourceKind::Iid,
            SourceSpec::Markov { .. } => SourceKind::Markov,
            SourceSpec::Rotation { .. } => SourceKind::Rotation,
            SourceSpec::Morphic { .. } => SourceKind::Morphic,
        }
    }

    /// Whether `gen` ignores its seed.
    pub fn is_deterministic(&self) -> bool {
        matches!(self.kind(), SourceKind::Periodic | SourceKind::Rotation | SourceKind::Morphic)
    }

    /// Cut points of a rotation, defaulting to `{0, θ}`.
    pub fn rotation_cuts(&self) -> Option<Vec<Real>> {
        match self {
            SourceSpec::Rotation { theta, boundaries, .. } => {
                Some(boundaries.clone().unwrap_or_else(|| vec![Real::zero(), theta.clone()]))
            }
            _ => None,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            SourceSpec::Periodic { pattern, alphabet_size } => alphabet_size
                .map(usize::from)
                .unwrap_or_else(|| pattern.iter().copied().max().map_or(1, |m| m as usize + 1)),
            SourceSpec::Iid { probs } => probs.len(),
            SourceSpec::Markov { trans, .. } => trans.len(),
            SourceSpec::Rotation { .. } => self.rotation_cuts().map_or(0, |c| c.len()),
            SourceSpec::Morphic { rules, .. } => rules.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::InvalidSource(msg));
        let alphabet = self.alphabet_size();
        if alphabet == 0 || alphabet > 256 {
            return bad(format!("alphabet size {alphabet} is outside 1..=256"));
        }
        match self {
            SourceSpec::Periodic { pattern, .. } => {
                if pattern.is_empty() {
                    return bad("periodic pattern is empty".into());
                }
                if pattern.iter().any(|&s| s as usize >= alphabet) {
                    return bad("pattern symbol outside the alphabet".into());
                }
            }
            SourceSpec::Iid { probs } => check_probs(probs, "iid probabilities")?,
            SourceSpec::Markov { trans, init } => {
                if init.len() != trans.len() {
                    return bad("initial distribution and matrix sizes differ".into());
                }
                check_probs(init, "initial distribution")?;
                for (i, row) in trans.iter().enumerate() {
                    if row.len() != trans.len() {
                        return bad(format!("transition row {i} is not square"));
                    }
                    check_probs(row, &format!("transition row {i}"))?;
                }
            }
            SourceSpec::Rotation { theta, phase, .. } => {
                let cuts = self.rotation_cuts().unwrap_or_default();
                RotationCoder::new(theta, phase, &cuts)?;
            }
            SourceSpec::Morphic { rules, axiom } => {
                if *axiom as usize >= rules.len() {
                    return bad("axiom outside the alphabet".into());
                }
                for (s, image) in rules.iter().enumerate() {
                    if image.is_empty() {
                        return bad(format!("rule for symbol {s} is erasing"));
                    }
                    if image.iter().any(|&t| t as usize >= rules.len()) {
                        return bad(format!("rule for symbol {s} leaves the alphabet"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_probs(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(LabError::InvalidSource(format!("{what} must be non-empty and within [0, 1]")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(LabError::InvalidSource(format!("{what} sum to {total}, not 1")));
    }
    Ok(())
}

/// Where a sequence came from: enough to regenerate it exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: SourceSpec,
    pub seed: u64,
    pub length: usize,
}

/// An immutable finite-alphabet sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSeq {
    symbols: Vec<u8>,
    alphabet_size: usize,
    provenance: Option<Provenance>,
}

impl SymbolSeq {
    /// Wraps raw symbols, checking every one is below `alphabet_size`.
    pub fn new(symbols: Vec<u8>, alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 || alphabet_size > 256 {
            return Err(LabError::InvalidArgument(format!("alphabet size {alphabet_size} is outside 1..=256")));
        }
        if let Some(pos) = symbols.iter().position(|&s| s as usize >= alphabet_size) {
            return Err(LabError::InvalidArgument(format!(
                "symbol {} at position {pos} is outside the alphabet of size {alphabet_size}",
                symbols[pos]
            )));
        }
        Ok(Self { symbols, alphabet_size, provenance: None })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Bits per raw symbol, `⌈log2 |A|⌉`.
    pub fn beta(&self) -> u32 {
        crate::ceil_log2(self.alphabet_size as u64)
    }

    /// A sub-range as a new sequence over the same alphabet.
    pub fn slice(&self, range: std::ops::Range<usize>) -> SymbolSeq {
        SymbolSeq { symbols: self.symbols[range].to_vec(), alphabet_size: self.alphabet_size, provenance: None }
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }

    /// Writes one byte per symbol to `path` and the provenance record to
    /// `path` with `.prov.toml` appended.
    pub fn export_raw(&self, path: &Path) -> Result<PathBuf> {
        fs::write(path, &self.symbols)?;
        let sidecar = sidecar_path(path);
        let record = SidecarRecord { alphabet_size: self.alphabet_size, provenance: self.provenance.clone() };
        let text = toml::to_string(&record).map_err(|e| LabError::Invariant(e.to_string()))?;
        fs::write(&sidecar, text)?;
        Ok(sidecar)
    }

    /// Reads a raw byte file and its sidecar written by [`export_raw`](Self::export_raw).
    pub fn import_raw(path: &Path) -> Result<Self> {
        let symbols = fs::read(path)?;
        let text = fs::read_to_string(sidecar_path(path))?;
        let record: SidecarRecord = toml::from_str(&text).map_err(|e| LabError::Config(e.to_string()))?;
        let mut seq = SymbolSeq::new(symbols, record.alphabet_size)?;
        seq.provenance = record.provenance;
        Ok(seq)
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".prov.toml");
    PathBuf::from(name)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SidecarRecord {
    alphabet_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

/// Generate `n` symbols of `spec`. Random kinds draw symbol by symbol from
/// stream 0 of `seed`, so shorter outputs are prefixes of longer ones.
pub fn gen(spec: &SourceSpec, n: usize, seed: u64) -> Result<SymbolSeq> {
    gen_stream(spec, n, seed, 0)
}

/// Like [`gen`] but reading the given ChaCha stream of `seed`.
pub fn gen_stream(spec: &SourceSpec, n: usize, seed: u64, stream: u64) -> Result<SymbolSeq> {
    if n == 0 {
        return Err(LabError::EmptySequence);
    }
    spec.validate()?;
    let symbols = match spec {
        SourceSpec::Periodic { pattern, .. } => pattern.iter().copied().cycle().take(n).collect(),
        SourceSpec::Iid { probs } => {
            let cdf = cumulative(probs);
            let mut rng = SeededStream::new(seed, stream);
            (0..n).map(|_| rng.categorical(&cdf)).collect()
        }
        SourceSpec::Markov { trans, init } => {
            let rows: Vec<Vec<f64>> = trans.iter().map(|r| cumulative(r)).collect();
            let mut rng = SeededStream::new(seed, stream);
            let mut state = rng.categorical(&cumulative(init));
            let mut out = Vec::with_capacity(n);
            out.push(state);
            for _ in 1..n {
                state = rng.categorical(&rows[state as usize]);
                out.push(state);
            }
            out
        }
        SourceSpec::Rotation { theta, phase, .. } => {
            let cuts = spec.rotation_cuts().unwrap_or_default();
            RotationCoder::new(theta, phase, &cuts)?.generate(n)?
        }
        SourceSpec::Morphic { rules, axiom } => morphic_prefix(rules, *axiom, n)?,
    };
    Ok(SymbolSeq {
        symbols,
        alphabet_size: spec.alphabet_size(),
        provenance: Some(Provenance { source: spec.clone(), seed, length: n }),
    })
}

/// Iterate the substitution from the axiom until at least `n` symbols exist.
fn morphic_prefix(rules: &[Vec<u8>], axiom: u8, n: usize) -> Result<Vec<u8>> {
    let mut word = vec![axiom];
    while word.len() < n {
        let next: Vec<u8> = word.iter().flat_map(|&s| rules[s as usize].iter().copied()).collect();
        if next.len() <= word.len() {
            return Err(LabError::InvalidSource(format!(
                "substitution stops growing at length {} from axiom {axiom}",
                word.len()
            )));
        }
        word = next;
    }
    word.truncate(n);
    Ok(word)
}

/// Entropy rate of the source in bits per symbol.
pub fn true_entropy(spec: &SourceSpec) -> Result<f64> {
    spec.validate()?;
    match spec {
        SourceSpec::Iid { probs } => Ok(probs.iter().filter(|&&p| p > 0.0).map(|p| -p * p.log2()).sum()),
        SourceSpec::Markov { trans, .. } => markov::entropy_rate(trans),
        SourceSpec::Periodic { .. } | SourceSpec::Rotation { .. } | SourceSpec::Morphic { .. } => Ok(0.0),
    }
}

/// Number of distinct length-`n` windows for `n = 1..=n_max`.
///
/// The sequence must hold at least `4·n_max` symbols so the counts are
/// not truncated by its length.
pub fn complexity_profile(seq: &SymbolSeq, n_max: usize) -> Result<Vec<usize>> {
    let x = seq.symbols();
    if n_max == 0 || n_max >= x.len() {
        return Err(LabError::InvalidArgument(format!(
            "n_max = {n_max} must be in 1..{} (the sequence length)",
            x.len()
        )));
    }
    if x.len() < 4 * n_max {
        return Err(LabError::InvalidArgument(format!(
            "sequence of length {} is shorter than 4·n_max = {}",
            x.len(),
            4 * n_max
        )));
    }
    Ok((1..=n_max).map(|n| x.windows(n).collect::<HashSet<_>>().len()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_example() {
        let s = gen(&SourceSpec::periodic(&[0, 1]), 10, 0).unwrap();
        assert_eq!(s.symbols(), &[0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn zero_length_rejected() {
        assert!(matches!(gen(&SourceSpec::fair_coin(), 0, 1), Err(LabError::EmptySequence)));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(true_entropy(&SourceSpec::fair_coin()).unwrap(), 1.0);
        let h = true_entropy(&SourceSpec::symmetric_markov(0.3)).unwrap();
        assert!((h - 0.881_290_899_230_693).abs() < 1e-12);
        assert_eq!(true_entropy(&SourceSpec::golden_sturmian()).unwrap(), 0.0);
        assert_eq!(true_entropy(&SourceSpec::fibonacci()).unwrap(), 0.0);
    }

    #[test]
    fn reducible_markov_entropy_errors() {
        let spec = SourceSpec::Markov { trans: vec![vec![1.0, 0.0], vec![0.0, 1.0]], init: vec![0.5, 0.5] };
        assert!(matches!(true_entropy(&spec), Err(LabError::NonErgodic(_))));
    }

    #[test]
    fn validation_catches_bad_probabilities() {
        assert!(SourceSpec::iid(&[0.5, 0.4]).validate().is_err());
        assert!(SourceSpec::iid(&[0.5, 0.5 + 1e-13]).validate().is_ok());
        let erasing = SourceSpec::Morphic { rules: vec![vec![0, 1], vec![]], axiom: 0 };
        assert!(erasing.validate().is_err());
    }

    #[test]
    fn non_growing_substitution_errors() {
        let spec = SourceSpec::Morphic { rules: vec![vec![0], vec![1]], axiom: 0 };
        assert!(gen(&spec, 10, 0).is_err());
    }

    #[test]
    fn fibonacci_prefix() {
        let s = gen(&SourceSpec::fibonacci(), 13, 0).unwrap();
        assert_eq!(s.symbols(), &[0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn complexity_examples() {
        let s = gen(&SourceSpec::golden_sturmian(), 1000, 0).unwrap();
        assert_eq!(complexity_profile(&s, 3).unwrap(), vec![2, 3, 4]);
        let p = gen(&SourceSpec::periodic(&[0, 1]), 400, 0).unwrap();
        assert!(complexity_profile(&p, 50).unwrap().iter().all(|&c| c == 2));
        assert!(complexity_profile(&p, 400).is_err());
        assert!(complexity_profile(&p, 101).is_err());
    }

    #[test]
    fn symbol_seq_rejects_out_of_alphabet() {
        assert!(SymbolSeq::new(vec![0, 1, 2], 2).is_err());
        assert_eq!(SymbolSeq::new(vec![0, 1, 3], 4).unwrap().beta(), 2);
    }

    #[test]
    fn raw_export_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = gen(&SourceSpec::symmetric_markov(0.2), 300, 9).unwrap();
        let path = dir.path().join("seq.bin");
        s.export_raw(&path).unwrap();
        let back = SymbolSeq::import_raw(&path).unwrap();
        assert_eq!(back, s);
        let regen = gen(&back.provenance().unwrap().source, 300, 9).unwrap();
        assert_eq!(regen.symbols(), s.symbols());
    }
}
