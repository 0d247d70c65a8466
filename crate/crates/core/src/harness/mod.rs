//! Experiment runner: configuration files, named presets and CSV output.
//!
//! Every CSV starts with one comment line `# lzlab <version> config=<hash>`
//! (see [`ExperimentConfig::hash`]). Files are written to a temporary name
//! and renamed into place; when an experiment fails, every file of the run
//! is removed again.

pub mod config;
pub mod presets;

use std::fs;
use std::path::{Path, PathBuf};

use crate::codecs::container::{self, Header};
use crate::codecs::sweep::{ratio_sweep, SweepResult, SweepRow};
use crate::codecs::{
    fdfs_decode, fdfs_encode, fslz_decode, fslz_encode, match_length_budget, swlz_decode, swlz_encode, Codec,
    Encoded, PhraseKind, PhraseRecord, ELIAS_GAMMA,
};
use crate::error::{LabError, Result};
use crate::estimators::{entropy_recurrence, match_series, ow2_trend, EstimatorRun, GFn};
use crate::ldp::{estimator_tail, tail_probability};
use crate::recur::{lz78_parse, match_length, recurrence_time, Recurrence, RecurrenceProfile};
use crate::rng::{task_stream, SeededStream};
use crate::sources::{complexity_profile, gen, gen_stream, Real, SourceSpec};
use crate::SymbolSeq;

pub use config::{EstimateMethod, EstimatorTailSpec, Experiment, ExperimentConfig, Span};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stream families of the harness's own random draws.
const FAMILY_DUALITY: u32 = 1;
const FAMILY_LOSSLESS: u32 = 2;

/// Files written by a successful run, in write order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub hash: String,
    pub files: Vec<PathBuf>,
}

struct Outputs {
    dir: PathBuf,
    header: String,
    written: Vec<PathBuf>,
    verbose: bool,
}

impl Outputs {
    fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    fn put(&mut self, file: &str, bytes: &[u8]) -> Result<()> {
        let target = self.path(file);
        let tmp = self.path(&format!(".{file}.tmp"));
        self.written.push(target.clone());
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &target)?;
        if self.verbose {
            eprintln!("wrote {}", target.display());
        }
        Ok(())
    }

    fn csv(&mut self, file: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = self.header.clone().into_bytes();
        body(&mut buf)?;
        self.put(file, &buf)
    }

    fn remove_all(&self) {
        for f in &self.written {
            let _ = fs::remove_file(f);
            if let Some(name) = f.file_name() {
                let _ = fs::remove_file(self.dir.join(format!(".{}.tmp", name.to_string_lossy())));
            }
        }
    }
}

pub fn comment_line(hash: &str) -> String {
    format!("# lzlab {VERSION} config={hash}\n")
}

/// Runs every experiment of `config` in name order.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    run_with(config, false)
}

/// [`run`] with progress messages on standard error.
pub fn run_with(config: &ExperimentConfig, verbose: bool) -> Result<RunSummary> {
    config.validate()?;
    let hash = config.hash()?;
    fs::create_dir_all(&config.output)?;
    let mut out = Outputs { dir: config.output.clone(), header: comment_line(&hash), written: Vec::new(), verbose };
    for (name, experiment) in &config.experiment {
        if verbose {
            eprintln!("running {name} ({})", experiment.kind());
        }
        if let Err(e) = run_one(name, experiment, config.seed, &mut out) {
            out.remove_all();
            return Err(e);
        }
    }
    Ok(RunSummary { hash, files: out.written })
}

fn run_one(name: &str, e: &Experiment, seed: u64, out: &mut Outputs) -> Result<()> {
    match e {
        Experiment::Generate { source, length, complexity_max } => {
            let seq = gen(source, *length, seed)?;
            let tmp = out.path(&format!(".{name}.raw.tmp"));
            let target = out.path(&format!("{name}.raw"));
            out.written.push(target.clone());
            out.written.push(out.path(&format!("{name}.raw.prov.toml")));
            let tmp_sidecar = seq.export_raw(&tmp)?;
            fs::rename(&tmp, &target)?;
            fs::rename(tmp_sidecar, out.path(&format!("{name}.raw.prov.toml")))?;
            if let Some(n_max) = complexity_max {
                let p = complexity_profile(&seq, *n_max)?;
                out.csv(&format!("{name}_complexity.csv"), |buf| {
                    let mut w = csv::Writer::from_writer(buf);
                    w.write_record(["n", "p_n"])?;
                    for (k, c) in p.iter().enumerate() {
                        w.write_record([(k + 1).to_string(), c.to_string()])?;
                    }
                    w.flush()?;
                    Ok(())
                })?;
            }
        }
        Experiment::Lz78 { source, length } => {
            let seq = gen(source, *length, seed)?;
            let parse = lz78_parse(&seq)?;
            out.csv(&format!("{name}_phrases.csv"), |buf| parse.write_csv(buf, seq.symbols()))?;
        }
        Experiment::Recur { source, length, positions, n_grid, max_lookback } => {
            let seq = gen(source, *length, seed)?;
            let profile = RecurrenceProfile::compute(&seq, positions.start..positions.end, n_grid, *max_lookback)?;
            out.csv(&format!("{name}_profile.csv"), |buf| profile.write_csv(buf))?;
        }
        Experiment::Duality { instances, max_length } => {
            let rows = duality_instances(*instances, *max_length, seed)?;
            out.csv(&format!("{name}_instances.csv"), |buf| write_duality(&rows, buf))?;
        }
        Experiment::Lossless { codecs, configs } => {
            let mut rows = Vec::new();
            for &codec in codecs {
                for k in 0..*configs {
                    rows.push(lossless_case(codec, k as u64, seed)?);
                }
            }
            if let Some(bad) = rows.iter().find(|r| !r.ok) {
                return Err(LabError::Invariant(format!(
                    "{} configuration {} did not round-trip",
                    bad.codec.name(),
                    bad.config
                )));
            }
            out.csv(&format!("{name}_roundtrips.csv"), |buf| write_lossless(&rows, buf))?;
        }
        Experiment::Encode { source, length, codec, n_w, lo } => {
            let l_o = match lo {
                Some(rule) => Some(match_length_budget(&rule.policy, *n_w as u64, rule.eps)?),
                None if *codec == Codec::Swlz => None,
                None => return Err(LabError::Config(format!("experiment.{name}.lo is required for {}", codec.name()))),
            };
            let (seq, database) = match codec {
                Codec::Fdfs => {
                    let all = gen(source, n_w + length, seed)?;
                    (all.slice(*n_w..n_w + length), Some(all.slice(0..*n_w)))
                }
                _ => (gen(source, *length, seed)?, None),
            };
            let encoded = encode(*codec, &seq, database.as_ref(), *n_w, l_o)?;
            encoded.report.check(&encoded.records)?;
            let decoded = decode(*codec, &encoded.stream, database.as_ref(), *n_w, l_o, seq.len(), seq.alphabet_size())?;
            if decoded.symbols() != seq.symbols() {
                return Err(LabError::Invariant("encoding does not round-trip".into()));
            }
            out.csv(&format!("{name}_phrases.csv"), |buf| write_phrases(&encoded.records, buf))?;
            let single = SweepResult {
                rows: vec![SweepRow { n_w: *n_w, seed, report: encoded.report.clone() }],
                fits: Err("single encoding".into()),
            };
            out.csv(&format!("{name}_report.csv"), |buf| single.write_rows_csv(buf, source.kind().name()))?;
        }
        Experiment::Sweep(spec) => {
            let result = ratio_sweep(spec)?;
            out.csv(&format!("{name}_rows.csv"), |buf| result.write_rows_csv(buf, spec.source.kind().name()))?;
            out.csv(&format!("{name}_fit.csv"), |buf| result.write_fit_csv(buf))?;
        }
        Experiment::Estimate { source, method, seeds } => {
            let seeds = if seeds.is_empty() { vec![seed] } else { seeds.clone() };
            match method {
                EstimateMethod::Recurrence { n, q, history } => {
                    let q = q.unwrap_or(n * n);
                    let mut runs = Vec::new();
                    for &s in &seeds {
                        let seq = gen(source, history + q + n - 1, s)?;
                        runs.push((s, entropy_recurrence(&seq, *n, q, *history)?));
                    }
                    out.csv(&format!("{name}_runs.csv"), |buf| EstimatorRun::write_csv(&runs, buf))?;
                }
                EstimateMethod::Matchlength { m_grid, anchors, length } => {
                    let mut series = Vec::new();
                    for &s in &seeds {
                        let seq = gen(source, *length, s)?;
                        series.push((s, match_series(&seq, m_grid, *anchors, GFn::Linear)?));
                    }
                    out.csv(&format!("{name}_series.csv"), |buf| {
                        let mut w = csv::Writer::from_writer(buf);
                        w.write_record(["seed", "m", "g", "estimate", "mean_length", "anchors", "capped"])?;
                        for (s, m) in &series {
                            for p in &m.points {
                                w.write_record([
                                    s.to_string(),
                                    p.m.to_string(),
                                    m.g.name().to_string(),
                                    format!("{:.9}", p.estimate),
                                    format!("{:.6}", p.mean_length),
                                    p.anchors.to_string(),
                                    p.capped.to_string(),
                                ])?;
                            }
                        }
                        w.flush()?;
                        Ok(())
                    })?;
                }
            }
        }
        Experiment::Ow2 { source, length, g, m_grid, anchors, target } => {
            let seq = gen(source, *length, seed)?;
            let trend = ow2_trend(&seq, *g, m_grid, *anchors, *target)?;
            out.csv(&format!("{name}_series.csv"), |buf| trend.series.write_csv(buf))?;
            out.csv(&format!("{name}_trend.csv"), |buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["g", "target", "first_distance", "last_distance", "convergence"])?;
                w.write_record([
                    g.name().to_string(),
                    target.to_string(),
                    format!("{:.9}", trend.first_distance),
                    format!("{:.9}", trend.last_distance),
                    format!("{:.9}", trend.convergence()),
                ])?;
                w.flush()?;
                Ok(())
            })?;
        }
        Experiment::Ldp { source, n_grid, eps_grid, trials, estimator } => {
            let tails = tail_probability(source, n_grid, eps_grid, *trials, seed)?;
            out.csv(&format!("{name}_tails.csv"), |buf| tails.write_csv(buf))?;
            out.csv(&format!("{name}_rates.csv"), |buf| tails.write_fit_csv(buf))?;
            if let Some(spec) = estimator {
                let k = spec.q_exponent;
                let j = estimator_tail(source, n_grid, spec.eps, |n| n.pow(k), spec.trials.unwrap_or(*trials), seed)?;
                out.csv(&format!("{name}_estimator.csv"), |buf| j.write_csv(buf))?;
                out.csv(&format!("{name}_estimator_rates.csv"), |buf| j.write_fit_csv(buf))?;
            }
        }
    }
    Ok(())
}

/// Encodes with any codec; `database` is required for FDFS-LZ and `l_o`
/// for both fixed-shift codecs.
pub fn encode(codec: Codec, seq: &SymbolSeq, database: Option<&SymbolSeq>, n_w: usize, l_o: Option<usize>) -> Result<Encoded> {
    let need_lo = || l_o.ok_or_else(|| LabError::InvalidArgument(format!("{} needs a block length", codec.name())));
    match codec {
        Codec::Swlz => swlz_encode(seq, n_w, ELIAS_GAMMA),
        Codec::Fslz => fslz_encode(seq, n_w, need_lo()?),
        Codec::Fdfs => {
            let db = database.ok_or_else(|| LabError::InvalidArgument("fdfs needs a database".into()))?;
            fdfs_encode(seq, db, need_lo()?)
        }
    }
}

pub fn decode(
    codec: Codec,
    stream: &crate::codecs::BitStream,
    database: Option<&SymbolSeq>,
    n_w: usize,
    l_o: Option<usize>,
    n: usize,
    alphabet_size: usize,
) -> Result<SymbolSeq> {
    let need_lo = || l_o.ok_or_else(|| LabError::InvalidArgument(format!("{} needs a block length", codec.name())));
    match codec {
        Codec::Swlz => swlz_decode(stream, n_w, n, alphabet_size),
        Codec::Fslz => fslz_decode(stream, n_w, need_lo()?, n, alphabet_size),
        Codec::Fdfs => {
            let db = database.ok_or_else(|| LabError::InvalidArgument("fdfs needs a database".into()))?;
            fdfs_decode(stream, db, need_lo()?, n, alphabet_size)
        }
    }
}

fn write_phrases(records: &[PhraseRecord], buf: &mut Vec<u8>) -> Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(["phrase", "kind", "start", "offset", "length", "match_len", "bits_used", "chosen_bits", "rejected_bits"])?;
    for (k, r) in records.iter().enumerate() {
        w.write_record([
            k.to_string(),
            match r.kind {
                PhraseKind::Matched => "matched",
                PhraseKind::Literal => "literal",
            }
            .to_string(),
            r.start.to_string(),
            r.offset.to_string(),
            r.length.to_string(),
            r.match_len.to_string(),
            r.bits_used.to_string(),
            r.chosen_bits.to_string(),
            r.rejected_bits.map_or(String::new(), |b| b.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One duality instance: `R_n > m ⟺ L_m < n` at position `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityInstance {
    pub alphabet_size: usize,
    pub len: usize,
    pub i: usize,
    pub n: usize,
    pub m: usize,
    /// Recurrence time searched over the whole past `x[0..i+n-1]`.
    pub recurrence: Recurrence,
    pub match_len: usize,
    pub brute_recurrence: Option<u64>,
    pub brute_match_len: usize,
    pub holds: bool,
}

/// Smallest `l` in `1..=i` with `x[i-l..i-l+n] == x[i..i+n]`.
pub fn brute_recurrence(x: &[u8], i: usize, n: usize) -> Option<u64> {
    (1..=i).find(|&l| x[i - l..i - l + n] == x[i..i + n]).map(|l| l as u64)
}

/// Longest `k` such that `x[i..i+k]` starts at some `j` in `i-m..i`,
/// copies allowed to run into `x[i..]`.
pub fn brute_match_length(x: &[u8], i: usize, m: usize) -> usize {
    (i - m..i).map(|j| (0..x.len() - i).take_while(|&k| x[j + k] == x[i + k]).count()).max().unwrap_or(0)
}

/// Random sequences from small i.i.d. and periodic sources with random
/// `(i, n, m)`; both quantities are computed by the library and by brute
/// force.
pub fn duality_instances(instances: usize, max_length: usize, seed: u64) -> Result<Vec<DualityInstance>> {
    if max_length < 2 {
        return Err(LabError::InvalidArgument("duality instances need sequences of 2 or more symbols".into()));
    }
    let mut rows = Vec::with_capacity(instances);
    for t in 0..instances as u64 {
        let mut rng = SeededStream::new(seed, task_stream(FAMILY_DUALITY, t));
        let len = 2 + (rng.next_u64() % (max_length as u64 - 1)) as usize;
        let alphabet = 2 + (rng.next_u64() % 3) as usize;
        let spec = if rng.next_u64() % 2 == 0 {
            SourceSpec::iid(&vec![1.0 / alphabet as f64; alphabet])
        } else {
            let period = 1 + (rng.next_u64() % 6) as usize;
            let pattern: Vec<u8> = (0..period).map(|_| (rng.next_u64() % alphabet as u64) as u8).collect();
            SourceSpec::Periodic { pattern, alphabet_size: Some(alphabet as u16) }
        };
        let seq = gen_stream(&spec, len, seed, task_stream(FAMILY_DUALITY, t) ^ (1 << 40))?;
        let x = seq.symbols();
        let i = 1 + (rng.next_u64() % (len as u64 - 1)) as usize;
        let n = 1 + (rng.next_u64() % (len - i) as u64) as usize;
        let m = 1 + (rng.next_u64() % i as u64) as usize;
        let recurrence = recurrence_time(&seq, i, n, i)?;
        let match_len = match_length(&seq, i, m)?.length;
        let brute_r = brute_recurrence(x, i, n);
        let brute_l = brute_match_length(x, i, m);
        let r_exceeds = recurrence.value().is_none_or(|r| r > m as u64);
        let holds = r_exceeds == (match_len < n) && recurrence.value() == brute_r && match_len == brute_l;
        rows.push(DualityInstance {
            alphabet_size: alphabet,
            len,
            i,
            n,
            m,
            recurrence,
            match_len,
            brute_recurrence: brute_r,
            brute_match_len: brute_l,
            holds,
        });
    }
    Ok(rows)
}

fn write_duality(rows: &[DualityInstance], buf: &mut Vec<u8>) -> Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(["instance", "alphabet", "len", "i", "n", "m", "r_n", "l_m", "r_brute", "l_brute", "holds"])?;
    for (k, r) in rows.iter().enumerate() {
        let opt = |v: Option<u64>| v.map_or(String::new(), |v| v.to_string());
        w.write_record([
            k.to_string(),
            r.alphabet_size.to_string(),
            r.len.to_string(),
            r.i.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            opt(r.recurrence.value()),
            r.match_len.to_string(),
            opt(r.brute_recurrence),
            r.brute_match_len.to_string(),
            u8::from(r.holds).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Outcome of one random round trip.
#[derive(Clone, Debug, PartialEq)]
pub struct LosslessCase {
    pub codec: Codec,
    pub config: u64,
    pub source: SourceSpec,
    pub n: usize,
    pub n_w: usize,
    pub l_o: Option<usize>,
    pub payload_bits: u64,
    pub ok: bool,
}

/// A random source of any of the five kinds.
pub fn random_source(rng: &mut SeededStream) -> SourceSpec {
    let weights = |rng: &mut SeededStream, k: usize| {
        let w: Vec<f64> = (0..k).map(|_| 0.05 + rng.uniform()).collect();
        let total: f64 = w.iter().sum();
        w.iter().map(|v| v / total).collect::<Vec<f64>>()
    };
    match rng.next_u64() % 5 {
        0 => {
            let alphabet = 2 + (rng.next_u64() % 4) as usize;
            let period = 1 + (rng.next_u64() % 12) as usize;
            let pattern = (0..period).map(|_| (rng.next_u64() % alphabet as u64) as u8).collect();
            SourceSpec::Periodic { pattern, alphabet_size: Some(alphabet as u16) }
        }
        1 => {
            let alphabet = 2 + (rng.next_u64() % 7) as usize;
            SourceSpec::Iid { probs: weights(rng, alphabet) }
        }
        2 => {
            let k = 2 + (rng.next_u64() % 3) as usize;
            SourceSpec::Markov { trans: (0..k).map(|_| weights(rng, k)).collect(), init: weights(rng, k) }
        }
        3 => {
            let theta = match rng.next_u64() % 3 {
                0 => Real::golden(),
                1 => Real::silver(),
                _ => Real::Quadratic { a: -1, b: 1, d: 2, c: 1 },
            };
            let den = 1 + (rng.next_u64() % 97) as i64;
            let phase = Real::Rational { num: (rng.next_u64() % den as u64) as i64, den };
            if rng.next_u64() % 2 == 0 {
                SourceSpec::Rotation { theta, phase, boundaries: None }
            } else {
                let cut = 1 + (rng.next_u64() % 9) as i64;
                SourceSpec::Rotation {
                    theta,
                    phase,
                    boundaries: Some(vec![Real::zero(), Real::Rational { num: cut, den: 10 }]),
                }
            }
        }
        _ => match rng.next_u64() % 3 {
            0 => SourceSpec::fibonacci(),
            1 => SourceSpec::Morphic { rules: vec![vec![0, 1], vec![1, 0]], axiom: 0 },
            _ => SourceSpec::Morphic { rules: vec![vec![0, 1, 2], vec![0, 2], vec![1]], axiom: 0 },
        },
    }
}

/// Draws a source, length, window and block length for configuration `k`
/// of `codec`, and checks that the decoder restores the input and that the
/// container header survives a byte round trip.
pub fn lossless_case(codec: Codec, k: u64, seed: u64) -> Result<LosslessCase> {
    let stream = task_stream(FAMILY_LOSSLESS, ((codec.id() as u64) << 32) | k);
    let mut rng = SeededStream::new(seed, stream);
    let source = random_source(&mut rng);
    let n = 1 + (rng.next_u64() % 3000) as usize;
    let n_w = 1 + (rng.next_u64() % 300) as usize;
    let l_o = match codec {
        Codec::Swlz => None,
        _ => Some(1 + (rng.next_u64() % 24) as usize),
    };
    let (seq, database) = match codec {
        Codec::Fdfs => {
            let all = gen_stream(&source, n_w + n, seed, stream)?;
            (all.slice(n_w..n_w + n), Some(all.slice(0..n_w)))
        }
        _ => (gen_stream(&source, n, seed, stream)?, None),
    };
    let encoded = encode(codec, &seq, database.as_ref(), n_w, l_o)?;
    encoded.report.check(&encoded.records)?;
    let header = Header {
        codec,
        alphabet_size: seq.alphabet_size() as u16,
        n: n as u64,
        n_w: n_w as u64,
        l_o: l_o.unwrap_or(0) as u64,
        payload_bits: encoded.stream.len_bits(),
    };
    let file = container::to_bytes(&header, &encoded.stream)?;
    let (back, payload) = container::from_bytes(&file)?;
    let decoded = decode(codec, &payload, database.as_ref(), back.n_w as usize, l_o, back.n as usize, back.alphabet_size as usize)?;
    Ok(LosslessCase {
        codec,
        config: k,
        ok: back == header && decoded.symbols() == seq.symbols(),
        source,
        n,
        n_w,
        l_o,
        payload_bits: encoded.stream.len_bits(),
    })
}

fn write_lossless(rows: &[LosslessCase], buf: &mut Vec<u8>) -> Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(["codec", "config", "source", "n", "n_w", "l_o", "payload_bits", "ok"])?;
    for r in rows {
        w.write_record([
            r.codec.name().to_string(),
            r.config.to_string(),
            r.source.kind().name().to_string(),
            r.n.to_string(),
            r.n_w.to_string(),
            r.l_o.map_or(String::new(), |l| l.to_string()),
            r.payload_bits.to_string(),
            u8::from(r.ok).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by the harness, skipping the comment line.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path)?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers()?.iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.map(|x| x.iter().map(String::from).collect())).collect::<Result<_, _>>()?;
    Ok((header, rows))
}
