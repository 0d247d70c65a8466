//! Compression ratio against window size for SWLZ and FSLZ on the Sturmian
//! source, with the fitted exponent of `ratio ≈ log2 n_w · n_w^{-a}`.

use lzlab::codecs::sweep::{ratio_sweep, LoRule, NRule, SweepSpec};
use lzlab::codecs::{BudgetPolicy, Codec};
use lzlab::sources::SourceSpec;

fn main() -> lzlab::Result<()> {
    for codec in [Codec::Swlz, Codec::Fslz] {
        let spec = SweepSpec {
            source: SourceSpec::golden_sturmian(),
            codec,
            n_w_grid: vec![1 << 6, 1 << 8, 1 << 10, 1 << 12],
            n_rule: NRule::Multiple { factor: 64 },
            seeds: vec![0],
            lo: (codec == Codec::Fslz).then_some(LoRule { policy: BudgetPolicy::Rotation, eps: 0.25 }),
        };
        let result = ratio_sweep(&spec)?;
        println!("{}:", codec.name());
        for row in &result.rows {
            let r = &row.report;
            println!(
                "  n_w = {:>5}  L_o = {:>5}  ratio {:.5}  coded ratio {:.5}  misses {}",
                row.n_w,
                r.l_o.map_or("-".into(), |l| l.to_string()),
                r.actual_ratio,
                r.coded_ratio(),
                r.m2
            );
        }
        match &result.fits {
            Ok(fits) => {
                for f in fits {
                    println!("  fit on {} ratio: a = {:.3}, r² = {:.3}", f.quantity, f.a, f.r2);
                }
            }
            Err(reason) => println!("  no fit: {reason}"),
        }
    }
    Ok(())
}
