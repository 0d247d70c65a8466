//! LZ-78 parsing of the alternating sequence and of a fair coin.

use lzlab::recur::lz78_parse;
use lzlab::sources::{gen, SourceSpec};

fn main() -> lzlab::Result<()> {
    let alternating = gen(&SourceSpec::periodic(&[0, 1]), 30, 0)?;
    let parse = lz78_parse(&alternating)?;
    let words: Vec<String> = parse
        .words(alternating.symbols())
        .iter()
        .map(|w| w.iter().map(|s| char::from(b'0' + s)).collect())
        .collect();
    println!("phrases: {}", words.join(","));
    parse.write_csv(std::io::stdout().lock(), alternating.symbols())?;

    for n in [1_000usize, 10_000, 100_000] {
        let periodic = lz78_parse(&gen(&SourceSpec::periodic(&[0, 1]), n, 0)?)?.c();
        let coin = lz78_parse(&gen(&SourceSpec::fair_coin(), n, 0)?)?.c();
        println!(
            "N = {n:>6}: periodic c(N) = {periodic:>5} (c/√N = {:.3}), coin c(N) = {coin:>6} (c·log2 N / N = {:.3})",
            periodic as f64 / (n as f64).sqrt(),
            coin as f64 * (n as f64).log2() / n as f64
        );
    }
    Ok(())
}
