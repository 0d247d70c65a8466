//! Tail probabilities of `log2 R_n / n` and their exponential decay rates.

use lzlab::ldp::{estimator_tail, tail_probability, Tail};
use lzlab::sources::SourceSpec;

fn main() -> lzlab::Result<()> {
    let markov = SourceSpec::symmetric_markov(0.3);
    let eps = [0.25, 0.35];
    let est = tail_probability(&markov, &[6, 9, 12, 15], &eps, 2_000, 11)?;
    println!("H = {:.4}", est.entropy);
    est.write_csv(std::io::stdout().lock())?;
    for &e in &eps {
        for tail in [Tail::Upper, Tail::Lower] {
            match &est.fit(e, tail).unwrap().fit {
                Ok(f) => println!(
                    "eps {e} {}: rate {:.3} in [{:.3}, {:.3}], r² {:.3}",
                    tail.name(),
                    f.rate,
                    f.band.0,
                    f.band.1,
                    f.r2
                ),
                Err(reason) => println!("eps {e} {}: {reason}", tail.name()),
            }
        }
        println!("I({e}) = {:?}", est.rate_function(e));
    }

    let j = estimator_tail(&markov, &[6, 8, 10, 12], 0.2, |n| n * n, 1_000, 11)?;
    println!("P(|J_n - H| > 0.2): {:?}", j.series(0.2, Tail::Estimator));
    Ok(())
}
