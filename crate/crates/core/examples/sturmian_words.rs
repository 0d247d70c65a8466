//! Sturmian words from the golden rotation: word complexity, symbol
//! frequency, the Fibonacci substitution and continued-fraction diagnostics.

use lzlab::sources::{cf_expand, complexity_profile, gen, Quad, Real, SourceSpec};

fn main() -> lzlab::Result<()> {
    let spec = SourceSpec::golden_sturmian();
    let word = gen(&spec, 100_000, 0)?;
    let head: String = word.symbols()[..40].iter().map(|s| char::from(b'0' + s)).collect();
    println!("x = {head}...");

    let p = complexity_profile(&word, 16)?;
    println!("p(n), n = 1..16: {p:?}");

    let ones = word.symbols().iter().filter(|&&s| s == 1).count() as f64 / word.len() as f64;
    println!("frequency of 1: {ones:.5} (1 - θ = {:.5})", 1.0 - Real::golden().to_f64());

    // A second cut at 0.3 gives a generic two-interval partition.
    let generic = SourceSpec::Rotation {
        theta: Real::golden(),
        phase: Real::zero(),
        boundaries: Some(vec![Real::zero(), Real::Rational { num: 3, den: 10 }]),
    };
    let p2 = complexity_profile(&gen(&generic, 100_000, 0)?, 8)?;
    println!("generic partition p(n): {p2:?}");

    let fib = gen(&SourceSpec::fibonacci(), 40, 0)?;
    let fib_head: String = fib.symbols().iter().map(|s| char::from(b'0' + s)).collect();
    println!("Fibonacci word = {fib_head}");

    let theta = Quad::new(-1, 1, 5, 2)?;
    let cf = cf_expand(&theta, 12, 1_000_000)?;
    println!("θ = [0; {:?}]", cf.partial_quotients);
    println!("convergents: {:?}", &cf.convergents[..6]);
    println!("min i·‖iθ‖ over i ≤ 10^6: {:.6}", cf.min_residual);
    Ok(())
}
