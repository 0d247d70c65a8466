use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lzlab::codecs::budget::{BudgetPolicy, GrowthFn};
use lzlab::codecs::container::{self, Header};
use lzlab::codecs::sweep::{LoRule, NRule, SweepSpec};
use lzlab::codecs::{match_length_budget, Codec};
use lzlab::harness::presets::{preset, PRESETS};
use lzlab::harness::{self, EstimateMethod, EstimatorTailSpec, Experiment, ExperimentConfig, Span};
use lzlab::sources::{gen, SourceSpec};
use lzlab::{LabError, Result, SymbolSeq};

/// Lempel-Ziv, recurrence-time and large-deviation experiments.
#[derive(Parser)]
#[command(name = "lzlab", version)]
struct Cli {
    /// Experiment configuration (TOML); run as is when no command is given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed, overriding the configuration's.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (a file for encode and decode).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Source description file (TOML with a `kind` key).
    #[arg(long)]
    source_config: Option<PathBuf>,
    /// Built-in source: coin, markov, sturmian, fibonacci or alternating.
    #[arg(long)]
    source: Option<String>,
}

#[derive(Args, Clone)]
struct CodecArgs {
    #[arg(long)]
    codec: Codec,
    /// Window (FSLZ, SWLZ) or database (FDFS-LZ) size.
    #[arg(long)]
    nw: usize,
    /// `rotation`, `positive-entropy:H` or `general-f:log|sqrt|linear:C`.
    #[arg(long)]
    lo_policy: Option<String>,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Write a raw symbol file with its provenance sidecar.
    Generate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: usize,
        /// Also write p(n) for n up to this value.
        #[arg(long)]
        complexity_max: Option<usize>,
    },
    /// Recurrence-time profile, or the LZ-78 phrase table with --lz78.
    Recur {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lz78: bool,
        /// Positions `start..end`.
        #[arg(long, default_value = "0..1")]
        positions: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 1 << 20)]
        max_lookback: usize,
    },
    /// Compress a raw symbol file (or a generated sequence) into a container.
    Encode {
        #[command(flatten)]
        source: SourceArgs,
        /// Raw symbol file written by `generate`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Length when generating instead of reading.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        codec: CodecArgs,
        /// Raw database file for FDFS-LZ.
        #[arg(long)]
        database: Option<PathBuf>,
    },
    /// Restore a raw symbol file from a container.
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        database: Option<PathBuf>,
    },
    /// Compression ratio over a grid of window sizes.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        codec: Codec,
        #[arg(long, value_delimiter = ',')]
        nw: Vec<usize>,
        #[arg(long)]
        lo_policy: Option<String>,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// `N = factor · n_w`; ignored when --length is given.
        #[arg(long, default_value_t = 64)]
        factor: usize,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
    },
    /// Entropy estimates from recurrence times or match lengths.
    Estimate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_parser = ["recurrence", "matchlength"])]
        method: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 1 << 20)]
        history: usize,
        #[arg(long, value_delimiter = ',')]
        m_grid: Vec<usize>,
        #[arg(long, default_value_t = 512)]
        anchors: usize,
        /// Sequence length for the match-length method.
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
    },
    /// Monte Carlo tail probabilities of recurrence times.
    Ldp {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_delimiter = ',')]
        n_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        eps_grid: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Also estimate the tail of J_n at this ε with Q = n².
        #[arg(long)]
        estimator_eps: Option<f64>,
    },
    /// Run a named preset, or list them.
    Preset {
        name: Option<String>,
        /// Reduced sizes with the same structure.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        list: bool,
    },
}

fn source_of(args: &SourceArgs) -> Result<SourceSpec> {
    match (&args.source_config, &args.source) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
            let spec: SourceSpec = toml::from_str(&text).map_err(|e| LabError::Config(e.to_string()))?;
            spec.validate()?;
            Ok(spec)
        }
        (None, Some(name)) => Ok(match name.as_str() {
            "coin" => SourceSpec::fair_coin(),
            "markov" => SourceSpec::symmetric_markov(0.3),
            "sturmian" => SourceSpec::golden_sturmian(),
            "fibonacci" => SourceSpec::fibonacci(),
            "alternating" => SourceSpec::periodic(&[0, 1]),
            other => return Err(LabError::Config(format!("unknown built-in source `{other}`"))),
        }),
        (None, None) => Err(LabError::Config("give --source-config or --source".into())),
        (Some(_), Some(_)) => Err(LabError::Config("--source-config and --source are exclusive".into())),
    }
}

fn lo_rule(policy: &Option<String>, eps: f64) -> Result<Option<LoRule>> {
    let Some(text) = policy else { return Ok(None) };
    let parts: Vec<&str> = text.split(':').collect();
    let number = |s: &str| s.parse::<f64>().map_err(|_| LabError::Config(format!("bad number `{s}` in --lo-policy")));
    let policy = match parts.as_slice() {
        ["rotation"] => BudgetPolicy::Rotation,
        ["positive-entropy", h] => BudgetPolicy::PositiveEntropy { h: number(h)? },
        ["general-f", f, c] => {
            let f = match *f {
                "log" => GrowthFn::Log,
                "sqrt" => GrowthFn::Sqrt,
                "linear" => GrowthFn::Linear,
                other => return Err(LabError::Config(format!("unknown growth function `{other}`"))),
            };
            BudgetPolicy::GeneralF { f, c: number(c)? }
        }
        _ => return Err(LabError::Config(format!("unrecognised --lo-policy `{text}`"))),
    };
    Ok(Some(LoRule { policy, eps }))
}

fn single(cli: &Cli, name: &str, default_seed: u64, experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        seed: cli.seed.unwrap_or(default_seed),
        output: cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(name)),
        experiment: BTreeMap::from([(name.to_string(), experiment)]),
    }
}

fn parse_span(text: &str) -> Result<Span> {
    let (a, b) = text.split_once("..").ok_or_else(|| LabError::Config(format!("positions `{text}` are not start..end")))?;
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| LabError::Config(format!("bad position `{s}`")));
    Ok(Span { start: num(a)?, end: num(b)? })
}

fn run_config(cli: &Cli, mut config: ExperimentConfig) -> Result<()> {
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output = out.clone();
    }
    let summary = harness::run_with(&config, cli.verbose)?;
    for f in &summary.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn read_raw(path: &Path) -> Result<SymbolSeq> {
    SymbolSeq::import_raw(path).map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))
}

fn encode_file(cli: &Cli, source: &SourceArgs, input: &Option<PathBuf>, n: Option<usize>, codec: &CodecArgs, database: &Option<PathBuf>) -> Result<()> {
    let out = cli.out.clone().ok_or_else(|| LabError::Config("encode needs --out <file>".into()))?;
    let seq = match (input, n) {
        (Some(path), _) => read_raw(path)?,
        (None, Some(n)) => gen(&source_of(source)?, n, cli.seed.unwrap_or(0))?,
        (None, None) => return Err(LabError::Config("give --input, or a source and --n".into())),
    };
    let db = database.as_deref().map(read_raw).transpose()?;
    let l_o = match lo_rule(&codec.lo_policy, codec.eps)? {
        Some(rule) => Some(match_length_budget(&rule.policy, codec.nw as u64, rule.eps)?),
        None if codec.codec == Codec::Swlz => None,
        None => return Err(LabError::Config(format!("{} needs --lo-policy", codec.codec.name()))),
    };
    let n_w = match (&db, codec.codec) {
        (Some(d), Codec::Fdfs) if d.len() != codec.nw => {
            return Err(LabError::Config(format!("database holds {} symbols, --nw is {}", d.len(), codec.nw)))
        }
        _ => codec.nw,
    };
    let encoded = harness::encode(codec.codec, &seq, db.as_ref(), n_w, l_o)?;
    let header = Header {
        codec: codec.codec,
        alphabet_size: seq.alphabet_size() as u16,
        n: seq.len() as u64,
        n_w: n_w as u64,
        l_o: l_o.unwrap_or(0) as u64,
        payload_bits: encoded.stream.len_bits(),
    };
    std::fs::write(&out, container::to_bytes(&header, &encoded.stream)?)?;
    let r = &encoded.report;
    println!("{} N={} n_w={} payload_bits={} ratio={:.6}", r.codec.name(), r.n, r.n_w, r.payload_bits, r.actual_ratio);
    Ok(())
}

fn decode_file(cli: &Cli, input: &Path, database: &Option<PathBuf>) -> Result<()> {
    let out = cli.out.clone().ok_or_else(|| LabError::Config("decode needs --out <file>".into()))?;
    let bytes = std::fs::read(input)?;
    let (header, payload) = container::from_bytes(&bytes)?;
    let db = database.as_deref().map(read_raw).transpose()?;
    let l_o = (header.codec != Codec::Swlz).then_some(header.l_o as usize);
    let seq = harness::decode(
        header.codec,
        &payload,
        db.as_ref(),
        header.n_w as usize,
        l_o,
        header.n as usize,
        header.alphabet_size as usize,
    )?;
    seq.export_raw(&out)?;
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    }
    if let Some(path) = &cli.config {
        let config = ExperimentConfig::load(path)?;
        if let Some(cmd) = &cli.command {
            let want = match cmd {
                Command::Generate { .. } => "generate",
                Command::Recur { .. } => "recur",
                Command::Sweep { .. } => "sweep",
                Command::Estimate { .. } => "estimate",
                Command::Ldp { .. } => "ldp",
                _ => return Err(LabError::Config("--config applies to experiment commands only".into())),
            };
            if let Some((name, e)) = config.experiment.iter().find(|(_, e)| e.kind() != want && !(want == "recur" && e.kind() == "lz78")) {
                return Err(LabError::Config(format!("experiment.{name} is a {} experiment, not {want}", e.kind())));
            }
        }
        return run_config(cli, config);
    }
    let Some(cmd) = &cli.command else {
        return Err(LabError::Config("give a command or --config".into()));
    };
    let config = match cmd {
        Command::Generate { source, n, complexity_max } => single(
            cli,
            "generate",
            0,
            Experiment::Generate { source: source_of(source)?, length: *n, complexity_max: *complexity_max },
        ),
        Command::Recur { source, n, lz78, positions, n_grid, max_lookback } => {
            let source = source_of(source)?;
            let e = if *lz78 {
                Experiment::Lz78 { source, length: *n }
            } else {
                Experiment::Recur {
                    source,
                    length: *n,
                    positions: parse_span(positions)?,
                    n_grid: n_grid.clone(),
                    max_lookback: *max_lookback,
                }
            };
            single(cli, "recur", 0, e)
        }
        Command::Encode { source, input, n, codec, database } => return encode_file(cli, source, input, *n, codec, database),
        Command::Decode { input, database } => return decode_file(cli, input, database),
        Command::Sweep { source, codec, nw, lo_policy, eps, factor, length, seeds } => single(
            cli,
            "sweep",
            0,
            Experiment::Sweep(SweepSpec {
                source: source_of(source)?,
                codec: *codec,
                n_w_grid: nw.clone(),
                n_rule: match length {
                    Some(n) => NRule::Fixed { n: *n },
                    None => NRule::Multiple { factor: *factor },
                },
                seeds: seeds.clone(),
                lo: lo_rule(lo_policy, *eps)?,
            }),
        ),
        Command::Estimate { source, method, n, q, history, m_grid, anchors, length, seeds } => {
            let method = if method == "recurrence" {
                let n = n.ok_or_else(|| LabError::Config("--method recurrence needs --n".into()))?;
                EstimateMethod::Recurrence { n, q: *q, history: *history }
            } else {
                if m_grid.is_empty() {
                    return Err(LabError::Config("--method matchlength needs --m-grid".into()));
                }
                let top = *m_grid.iter().max().unwrap();
                EstimateMethod::Matchlength {
                    m_grid: m_grid.clone(),
                    anchors: *anchors,
                    length: length.unwrap_or(4 * (top + anchors)),
                }
            };
            single(cli, "estimate", 0, Experiment::Estimate { source: source_of(source)?, method, seeds: seeds.clone() })
        }
        Command::Ldp { source, n_grid, eps_grid, trials, estimator_eps } => single(
            cli,
            "ldp",
            0,
            Experiment::Ldp {
                source: source_of(source)?,
                n_grid: n_grid.clone(),
                eps_grid: eps_grid.clone(),
                trials: *trials,
                estimator: estimator_eps.map(|eps| EstimatorTailSpec { eps, q_exponent: 2, trials: None }),
            },
        ),
        Command::Preset { name, quick, list } => {
            if *list || name.is_none() {
                for (n, d) in PRESETS {
                    println!("{n:24} {d}");
                }
                return Ok(());
            }
            preset(name.as_deref().unwrap(), *quick)?
        }
    };
    run_config(cli, config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lzlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
