//! Recurrence times, match lengths and their duality.

use lzlab::recur::{match_length, recurrence_time, MatchIndex, RecurrenceProfile};
use lzlab::sources::{gen, SourceSpec};

fn main() -> lzlab::Result<()> {
    let seq = gen(&SourceSpec::symmetric_markov(0.3), 1 << 16, 7)?;
    let i = 1 << 15;
    for n in [4, 8, 12, 16] {
        let r = recurrence_time(&seq, i, n, i)?;
        println!("R_{n} at {i}: {r:?}");
    }

    // R_n > m exactly when L_m < n.
    for m in [16, 256, 4096] {
        let l = match_length(&seq, i, m)?;
        let r = recurrence_time(&seq, i, l.length + 1, i)?;
        let r_l = recurrence_time(&seq, i, l.length.max(1), i)?;
        println!(
            "m = {m:>4}: L_m = {:>2}, R_(L+1) = {:?} > m, R_L = {:?} <= m",
            l.length,
            r.value(),
            r_l.value()
        );
    }

    let index = MatchIndex::new(seq.symbols(), seq.alphabet_size(), 4096);
    let hit = index.longest_match(i, i - 4096, 4096, seq.len() - i, true);
    println!("longest match in the last 4096 symbols: starts at {}, length {}", hit.offset, hit.length);

    let sturmian = gen(&SourceSpec::golden_sturmian(), 1 << 16, 0)?;
    let profile = RecurrenceProfile::compute(&sturmian, 40_000..40_004, &[2, 4, 8, 16, 32], 1 << 15)?;
    profile.verify(sturmian.symbols())?;
    println!("Sturmian recurrence profile:");
    profile.write_csv(std::io::stdout().lock())?;
    Ok(())
}
