//! SWLZ on three sources, with the phrase log, bit accounting and a
//! compressed file written and read back.

use lzlab::codecs::container::{self, Header};
use lzlab::codecs::{swlz_decode, swlz_encode, Codec, PhraseKind, ELIAS_GAMMA};
use lzlab::sources::{gen, SourceSpec};

fn main() -> lzlab::Result<()> {
    let sources = [
        ("alternating", SourceSpec::periodic(&[0, 1])),
        ("sturmian", SourceSpec::golden_sturmian()),
        ("markov 0.3", SourceSpec::symmetric_markov(0.3)),
    ];
    for (name, spec) in sources {
        let seq = gen(&spec, 1 << 16, 1)?;
        let enc = swlz_encode(&seq, 1 << 10, ELIAS_GAMMA)?;
        enc.report.check(&enc.records)?;
        let back = swlz_decode(&enc.stream, 1 << 10, seq.len(), seq.alphabet_size())?;
        assert_eq!(back.symbols(), seq.symbols());
        let literals = enc.records.iter().filter(|r| r.kind == PhraseKind::Literal).count();
        let r = &enc.report;
        println!(
            "{name:>12}: {} phrases ({literals} literal), payload {} bits, ratio {:.4}, formula ratio {:.4}",
            r.phrases, r.payload_bits, r.actual_ratio, r.formula_ratio
        );
        println!("              terms {:?}", r.terms);
    }

    let seq = gen(&SourceSpec::periodic(&[0, 1]), 1 << 16, 0)?;
    let enc = swlz_encode(&seq, 2, ELIAS_GAMMA)?;
    for rec in &enc.records {
        println!("{rec:?}");
    }
    let header = Header {
        codec: Codec::Swlz,
        alphabet_size: 2,
        n: seq.len() as u64,
        n_w: 2,
        l_o: 0,
        payload_bits: enc.stream.len_bits(),
    };
    let dir = std::env::temp_dir().join("lzlab-swlz-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("alternating.lzb");
    std::fs::write(&path, container::to_bytes(&header, &enc.stream)?)?;
    let (read, payload) = container::from_bytes(&std::fs::read(&path)?)?;
    let back = swlz_decode(&payload, read.n_w as usize, read.n as usize, read.alphabet_size as usize)?;
    assert_eq!(back.symbols(), seq.symbols());
    println!("{} bytes on disk for {} symbols", std::fs::metadata(&path)?.len(), seq.len());
    Ok(())
}
