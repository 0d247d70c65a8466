//! Experiment configuration files.
//!
//! A configuration is a TOML document with a root `seed`, an `output`
//! directory and one or more named experiments under `[experiment.<name>]`.
//! Each experiment has a `kind` and the fields listed on [`Experiment`];
//! unknown keys are rejected everywhere. Output files are named
//! `<name>_<table>.csv` inside `output`.
//!
//! ```toml
//! seed = 1
//! output = "out/floor"
//!
//! [experiment.markov]
//! kind = "sweep"
//! codec = "swlz"
//! n_w_grid = [16384]
//! n_rule = { rule = "fixed", n = 1048576 }
//! seeds = [0, 1, 2, 3, 4]
//! source = { kind = "markov", trans = [[0.7, 0.3], [0.3, 0.7]], init = [0.5, 0.5] }
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codecs::sweep::{LoRule, SweepSpec};
use crate::codecs::Codec;
use crate::error::{LabError, Result};
use crate::estimators::GFn;
use crate::sources::SourceSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Root seed; every random draw of the run derives from it.
    pub seed: u64,
    /// Directory receiving every output file of the run.
    pub output: PathBuf,
    /// Experiments by name, run in name order.
    pub experiment: BTreeMap<String, Experiment>,
}

/// Half-open range `start..end` of positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// Entropy-estimation method and its parameters, written as a table named
/// after the method, e.g. `method.recurrence = { n = 24, history = 4096 }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum EstimateMethod {
    /// `J_n` over `q` anchors (default `n²`) with `history` symbols of past.
    Recurrence {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<usize>,
        history: usize,
    },
    /// `log2 m / L_m` averaged over `anchors` positions for every `m`.
    Matchlength { m_grid: Vec<usize>, anchors: usize, length: usize },
}

/// Tail-probability study options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorTailSpec {
    pub eps: f64,
    /// `Q(n) = n^q_exponent`.
    #[serde(default = "default_q_exponent")]
    pub q_exponent: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

fn default_q_exponent() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Raw symbol file with provenance sidecar and, optionally, the word
    /// complexity `p(n)` for `n <= complexity_max`.
    Generate {
        source: SourceSpec,
        length: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complexity_max: Option<usize>,
    },
    /// LZ-78 phrase table.
    Lz78 { source: SourceSpec, length: usize },
    /// Recurrence-time profile over a span of positions.
    Recur { source: SourceSpec, length: usize, positions: Span, n_grid: Vec<usize>, max_lookback: usize },
    /// Checks `R_n > m ⟺ L_m < n` on random instances.
    Duality { instances: usize, max_length: usize },
    /// Random encode/decode round trips for each codec.
    Lossless { codecs: Vec<Codec>, configs: usize },
    /// One encoding with its phrase log; FDFS-LZ uses the `n_w` symbols
    /// before the coded ones as database.
    Encode {
        source: SourceSpec,
        length: usize,
        codec: Codec,
        n_w: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<LoRule>,
    },
    Sweep(SweepSpec),
    /// Entropy estimates, one per seed (the root seed when `seeds` is
    /// empty).
    Estimate {
        source: SourceSpec,
        method: EstimateMethod,
        #[serde(default)]
        seeds: Vec<u64>,
    },
    /// `log2 m / g(L_m)` over a doubling grid against a target value.
    Ow2 { source: SourceSpec, length: usize, g: GFn, m_grid: Vec<usize>, anchors: usize, target: f64 },
    /// Recurrence-time tails, and the estimator tail when `estimator` is set.
    Ldp {
        source: SourceSpec,
        n_grid: Vec<usize>,
        eps_grid: Vec<f64>,
        trials: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        estimator: Option<EstimatorTailSpec>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Generate { .. } => "generate",
            Experiment::Lz78 { .. } => "lz78",
            Experiment::Recur { .. } => "recur",
            Experiment::Duality { .. } => "duality",
            Experiment::Lossless { .. } => "lossless",
            Experiment::Encode { .. } => "encode",
            Experiment::Sweep(_) => "sweep",
            Experiment::Estimate { .. } => "estimate",
            Experiment::Ow2 { .. } => "ow2",
            Experiment::Ldp { .. } => "ldp",
        }
    }
}

/// Required keys per experiment kind, for error messages that name every
/// missing field at once.
fn required_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "generate" => &["source", "length"],
        "lz78" => &["source", "length"],
        "recur" => &["source", "length", "positions", "n_grid", "max_lookback"],
        "duality" => &["instances", "max_length"],
        "lossless" => &["codecs", "configs"],
        "encode" => &["source", "length", "codec", "n_w"],
        "sweep" => &["source", "codec", "n_w_grid", "n_rule", "seeds"],
        "estimate" => &["source", "method"],
        "ow2" => &["source", "length", "g", "m_grid", "anchors", "target"],
        "ldp" => &["source", "n_grid", "eps_grid", "trials"],
        _ => return None,
    })
}

const KINDS: &str = "generate, lz78, recur, duality, lossless, encode, sweep, estimate, ow2, ldp";

fn missing(table: &toml::Table, keys: &[&str], at: &str) -> Vec<String> {
    keys.iter().filter(|k| !table.contains_key(**k)).map(|k| format!("{at}{k}")).collect()
}

fn precheck(doc: &toml::Table) -> Result<()> {
    let mut absent = missing(doc, &["seed", "output", "experiment"], "");
    if let Some(toml::Value::Table(experiments)) = doc.get("experiment") {
        if experiments.is_empty() {
            absent.push("experiment.<name>".into());
        }
        for (name, value) in experiments {
            let at = format!("experiment.{name}.");
            let Some(table) = value.as_table() else {
                return Err(LabError::Config(format!("{} must be a table", &at[..at.len() - 1])));
            };
            match table.get("kind").and_then(|k| k.as_str()) {
                None => absent.push(format!("{at}kind")),
                Some(kind) => match required_keys(kind) {
                    Some(keys) => absent.extend(missing(table, keys, &at)),
                    None => {
                        return Err(LabError::Config(format!("{at}kind: unknown kind `{kind}`, expected one of {KINDS}")))
                    }
                },
            }
        }
    }
    if absent.is_empty() {
        Ok(())
    } else {
        Err(LabError::Config(format!("missing fields: {}", absent.join(", "))))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| LabError::Config(e.to_string()))?;
        precheck(&doc)?;
        let config: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Invariant(format!("config does not serialize: {e}")))
    }

    /// Checks that do not need running the experiment.
    pub fn validate(&self) -> Result<()> {
        if self.experiment.is_empty() {
            return Err(LabError::Config("missing fields: experiment.<name>".into()));
        }
        for (name, e) in &self.experiment {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(LabError::Config(format!("experiment name `{name}` must be letters, digits, - or _")));
            }
            let source = match e {
                Experiment::Generate { source, .. }
                | Experiment::Lz78 { source, .. }
                | Experiment::Recur { source, .. }
                | Experiment::Encode { source, .. }
                | Experiment::Estimate { source, .. }
                | Experiment::Ow2 { source, .. }
                | Experiment::Ldp { source, .. } => Some(source),
                Experiment::Sweep(s) => Some(&s.source),
                Experiment::Duality { .. } | Experiment::Lossless { .. } => None,
            };
            if let Some(s) = source {
                s.validate().map_err(|err| LabError::Config(format!("experiment.{name}.source: {err}")))?;
            }
        }
        Ok(())
    }

    /// First 16 hex digits of SHA-256 over the canonical TOML of the
    /// configuration with `output` cleared, so reruns into another
    /// directory carry the same hash.
    pub fn hash(&self) -> Result<String> {
        let mut canonical = self.clone();
        canonical.output = PathBuf::new();
        let digest = Sha256::digest(canonical.to_toml()?.as_bytes());
        Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
    }
}
