//! FSLZ and FDFS-LZ with the match-length budgets.

use lzlab::codecs::{
    fdfs_decode, fdfs_encode, fslz_decode, fslz_encode, match_length_budget, BudgetPolicy, GrowthFn,
};
use lzlab::sources::{gen, true_entropy, SourceSpec};

fn main() -> lzlab::Result<()> {
    let markov = SourceSpec::symmetric_markov(0.3);
    let h = true_entropy(&markov)?;
    println!("H(markov 0.3) = {h:.4}");
    for n_w in [1u64 << 10, 1 << 14, 1 << 18] {
        let pos = match_length_budget(&BudgetPolicy::PositiveEntropy { h }, n_w, 0.1)?;
        let rot = match_length_budget(&BudgetPolicy::Rotation, n_w, 0.25)?;
        let sqrt = match_length_budget(&BudgetPolicy::GeneralF { f: GrowthFn::Sqrt, c: 1.0 }, n_w, 0.25)?;
        println!("n_w = {n_w:>6}: L_o positive entropy {pos:>2}, rotation {rot:>5}, f = sqrt {sqrt:>3}");
    }

    let n_w = 1 << 12;
    let seq = gen(&markov, 1 << 16, 3)?;
    let l_o = match_length_budget(&BudgetPolicy::PositiveEntropy { h }, n_w as u64, 0.1)?;
    let enc = fslz_encode(&seq, n_w, l_o)?;
    let back = fslz_decode(&enc.stream, n_w, l_o, seq.len(), seq.alphabet_size())?;
    assert_eq!(back.symbols(), seq.symbols());
    let r = &enc.report;
    println!("FSLZ markov: L_o = {l_o}, m = {}, hits {}, misses {}, ratio {:.4}", r.m, r.m1, r.m2, r.actual_ratio);

    let sturmian = SourceSpec::golden_sturmian();
    let all = gen(&sturmian, n_w + (1 << 16), 0)?;
    let (database, seq) = (all.slice(0..n_w), all.slice(n_w..all.len()));
    let l_o = match_length_budget(&BudgetPolicy::Rotation, n_w as u64, 0.25)?;
    let enc = fdfs_encode(&seq, &database, l_o)?;
    let back = fdfs_decode(&enc.stream, &database, l_o, seq.len(), seq.alphabet_size())?;
    assert_eq!(back.symbols(), seq.symbols());
    let r = &enc.report;
    println!("FDFS sturmian: L_o = {l_o}, m = {}, misses {}, ratio {:.5}", r.m, r.m2, r.actual_ratio);
    Ok(())
}
