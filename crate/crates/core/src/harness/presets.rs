//! Named experiment presets, one per acceptance experiment.
//!
//! `preset(name, false)` is the full-size experiment; `preset(name, true)`
//! is a reduced version with the same structure for smoke runs and
//! determinism checks.

use std::collections::BTreeMap;
use std::path::PathBuf;

use super::config::{EstimateMethod, Experiment, ExperimentConfig};
use crate::codecs::budget::BudgetPolicy;
use crate::codecs::sweep::{LoRule, NRule, SweepSpec};
use crate::codecs::Codec;
use crate::error::{LabError, Result};
use crate::estimators::GFn;
use crate::sources::SourceSpec;

/// Preset names with a one-line description.
pub const PRESETS: &[(&str, &str)] = &[
    ("periodic-lz78", "LZ-78 phrase table of the first 30 symbols of 0101..."),
    ("lossless", "200 random round trips per codec over all source kinds"),
    ("duality", "R_n > m iff L_m < n on 10^4 random instances"),
    ("sturmian-complexity", "word complexity p(n), n <= 64, of a golden Sturmian word"),
    ("periodic-swlz", "SWLZ on 2^16 symbols of 0101... with n_w = 2"),
    ("sturmian-swlz-scaling", "SWLZ ratio over n_w = 2^8..2^16, N = 64 n_w, Sturmian source"),
    ("sturmian-fslz-scaling", "FSLZ with the rotation budget, eps = 0.25, same grid"),
    ("entropy-floor", "SWLZ at n_w = 2^14, N = 2^20 on the 0.3 Markov chain and the Sturmian source"),
    ("estimator-consistency", "J_24 with Q = 576 on 20 fair-coin seeds, and on 0101..."),
    ("ldp-shape", "recurrence-time tails at eps = 0.3, n in {8, 12, 16, 20}, fair coin and Markov"),
    ("ow2-trend", "log2 m / log2 L_m on the Sturmian source, m = 2^4..2^16"),
];

fn pow2(k: u32) -> usize {
    1 << k
}

fn config(name: &str, seed: u64, experiments: Vec<(&str, Experiment)>) -> ExperimentConfig {
    ExperimentConfig {
        seed,
        output: PathBuf::from("out").join(name),
        experiment: experiments.into_iter().map(|(k, e)| (k.to_string(), e)).collect::<BTreeMap<_, _>>(),
    }
}

fn scaling(codec: Codec, quick: bool) -> SweepSpec {
    let grid = if quick { vec![pow2(6), pow2(8), pow2(10)] } else { (8..=16).step_by(2).map(pow2).collect() };
    SweepSpec {
        source: SourceSpec::golden_sturmian(),
        codec,
        n_w_grid: grid,
        n_rule: NRule::Multiple { factor: 64 },
        seeds: vec![0],
        lo: (codec == Codec::Fslz).then_some(LoRule { policy: BudgetPolicy::Rotation, eps: 0.25 }),
    }
}

/// The configuration of a named preset, writing under `out/<name>`.
pub fn preset(name: &str, quick: bool) -> Result<ExperimentConfig> {
    let q = |full: usize, small: usize| if quick { small } else { full };
    Ok(match name {
        "periodic-lz78" => config(
            name,
            0,
            vec![("alternating", Experiment::Lz78 { source: SourceSpec::periodic(&[0, 1]), length: 30 })],
        ),
        "lossless" => config(
            name,
            0,
            vec![("random", Experiment::Lossless { codecs: vec![Codec::Fdfs, Codec::Fslz, Codec::Swlz], configs: q(200, 20) })],
        ),
        "duality" => config(
            name,
            0,
            vec![("random", Experiment::Duality { instances: q(10_000, 500), max_length: 300 })],
        ),
        "sturmian-complexity" => config(
            name,
            0,
            vec![(
                "golden",
                Experiment::Generate {
                    source: SourceSpec::golden_sturmian(),
                    length: q(100_000, 10_000),
                    complexity_max: Some(q(64, 16)),
                },
            )],
        ),
        "periodic-swlz" => config(
            name,
            0,
            vec![(
                "alternating",
                Experiment::Encode {
                    source: SourceSpec::periodic(&[0, 1]),
                    length: q(pow2(16), pow2(10)),
                    codec: Codec::Swlz,
                    n_w: 2,
                    lo: None,
                },
            )],
        ),
        "sturmian-swlz-scaling" => config(name, 0, vec![("sturmian", Experiment::Sweep(scaling(Codec::Swlz, quick)))]),
        "sturmian-fslz-scaling" => config(name, 0, vec![("sturmian", Experiment::Sweep(scaling(Codec::Fslz, quick)))]),
        "entropy-floor" => {
            let sweep = |source: SourceSpec, seeds: Vec<u64>| {
                Experiment::Sweep(SweepSpec {
                    source,
                    codec: Codec::Swlz,
                    n_w_grid: vec![q(pow2(14), pow2(8))],
                    n_rule: NRule::Fixed { n: q(pow2(20), pow2(14)) },
                    seeds,
                    lo: None,
                })
            };
            config(
                name,
                0,
                vec![
                    ("markov", sweep(SourceSpec::symmetric_markov(0.3), (0..5).collect())),
                    ("sturmian", sweep(SourceSpec::golden_sturmian(), vec![0])),
                ],
            )
        }
        "estimator-consistency" => {
            let n = q(24, 12);
            config(
                name,
                0,
                vec![
                    (
                        "coin",
                        Experiment::Estimate {
                            source: SourceSpec::fair_coin(),
                            method: EstimateMethod::Recurrence { n, q: None, history: q(pow2(27), pow2(15)) },
                            seeds: (0..q(20, 3) as u64).collect(),
                        },
                    ),
                    (
                        "periodic",
                        Experiment::Estimate {
                            source: SourceSpec::periodic(&[0, 1]),
                            method: EstimateMethod::Recurrence { n, q: None, history: 64 },
                            seeds: vec![0],
                        },
                    ),
                ],
            )
        }
        "ldp-shape" => {
            let n_grid = if quick { vec![4, 6, 8, 10] } else { vec![8, 12, 16, 20] };
            let ldp = |source| Experiment::Ldp {
                source,
                n_grid: n_grid.clone(),
                eps_grid: vec![0.3],
                trials: q(10_000, 1_000) as u64,
                estimator: None,
            };
            config(
                name,
                0,
                vec![("coin", ldp(SourceSpec::fair_coin())), ("markov", ldp(SourceSpec::symmetric_markov(0.3)))],
            )
        }
        "ow2-trend" => {
            let top = q(16, 10);
            config(
                name,
                0,
                vec![(
                    "sturmian",
                    Experiment::Ow2 {
                        source: SourceSpec::golden_sturmian(),
                        length: q(pow2(20), pow2(13)),
                        g: GFn::Log,
                        m_grid: (4..=top).map(|k| pow2(k as u32)).collect(),
                        anchors: 512,
                        target: 1.0,
                    },
                )],
            )
        }
        other => {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            return Err(LabError::Config(format!("unknown preset `{other}`; available: {}", names.join(", "))));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds_and_serializes() {
        for (name, _) in PRESETS {
            for quick in [false, true] {
                let c = preset(name, quick).unwrap();
                c.validate().unwrap();
                let text = c.to_toml().unwrap();
                assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c, "{name}");
            }
        }
        assert!(preset("nope", false).is_err());
    }
}
