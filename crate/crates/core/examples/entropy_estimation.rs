//! Entropy estimates from recurrence times and match lengths.

use lzlab::estimators::{entropy_matchlength, entropy_recurrence, ow2_trend, GFn};
use lzlab::sources::{gen, true_entropy, SourceSpec};

fn main() -> lzlab::Result<()> {
    let n = 16;
    let history = 1 << 22;
    for (name, spec) in [
        ("coin", SourceSpec::fair_coin()),
        ("markov 0.3", SourceSpec::symmetric_markov(0.3)),
        ("alternating", SourceSpec::periodic(&[0, 1])),
    ] {
        let seq = gen(&spec, history + n * n + n, 5)?;
        let run = entropy_recurrence(&seq, n, n * n, history)?;
        println!(
            "{name:>12}: H = {:.4}, J_{n} = {:.4} ({} censored{})",
            true_entropy(&spec)?,
            run.j_n,
            run.censored_count,
            if run.unreliable { ", unreliable" } else { "" }
        );
    }

    let grid: Vec<usize> = (6..=14).step_by(2).map(|k| 1 << k).collect();
    let coin = gen(&SourceSpec::fair_coin(), 1 << 18, 2)?;
    let series = entropy_matchlength(&coin, &grid, 256)?;
    println!("coin, log2 m / L_m:");
    series.write_csv(std::io::stdout().lock())?;

    let sturmian = gen(&SourceSpec::golden_sturmian(), 1 << 18, 0)?;
    let trend = ow2_trend(&sturmian, GFn::Log, &grid, 256, 1.0)?;
    let values: Vec<String> = trend.series.points.iter().map(|p| format!("{:.3}", p.estimate)).collect();
    println!("sturmian, log2 m / log2 L_m: {}", values.join(" "));
    println!("distance to 1: first {:.3}, last {:.3}", trend.first_distance, trend.last_distance);
    Ok(())
}
