use lzlab::harness::{brute_match_length, brute_recurrence, duality_instances};
use lzlab::recur::{
    longest_match_in_window, longest_match_naive, lz78_parse, match_length, recurrence_time, MatchIndex, Recurrence,
    RecurrenceProfile,
};
use lzlab::rng::SeededStream;
use lzlab::sources::{gen, gen_stream, SourceSpec};
use lzlab::SymbolSeq;
use proptest::prelude::*;

fn seq(symbols: &[u8], alphabet: usize) -> SymbolSeq {
    SymbolSeq::new(symbols.to_vec(), alphabet).unwrap()
}

#[test]
fn recurrence_examples() {
    let p = gen(&SourceSpec::periodic(&[0, 1]), 30, 0).unwrap();
    assert_eq!(recurrence_time(&p, 10, 7, 100).unwrap(), Recurrence::Found(2));
    let s = seq(&[0, 0, 1, 0], 2);
    assert_eq!(recurrence_time(&s, 2, 1, 2).unwrap(), Recurrence::Censored);
    assert!(recurrence_time(&s, 2, 3, 2).is_err());
    assert!(recurrence_time(&s, 0, 1, 2).is_err());
}

#[test]
fn match_length_examples() {
    let p = gen(&SourceSpec::periodic(&[0, 1]), 30, 0).unwrap();
    let l = match_length(&p, 10, 2).unwrap();
    assert_eq!((l.length, l.capped), (20, true));
    assert!(match_length(&p, 3, 4).is_err());
}

#[test]
fn oracle_agreement_on_random_binary() {
    let coin = gen(&SourceSpec::fair_coin(), 4000, 17).unwrap();
    let x = coin.symbols();
    let mut rng = SeededStream::new(17, 1);
    for _ in 0..1000 {
        let i = 1 + (rng.next_u64() % 3900) as usize;
        let n = 1 + (rng.next_u64() % 14) as usize;
        let m = 1 + (rng.next_u64() % i as u64) as usize;
        let r = recurrence_time(&coin, i, n, i).unwrap();
        assert_eq!(r.value(), brute_recurrence(x, i, n));
        assert_eq!(match_length(&coin, i, m).unwrap().length, brute_match_length(x, i, m));
    }
}

#[test]
fn duality_on_ten_thousand_instances() {
    let rows = duality_instances(10_000, 300, 5).unwrap();
    assert_eq!(rows.len(), 10_000);
    let bad: Vec<_> = rows.iter().filter(|r| !r.holds).collect();
    assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(3)]);
}

#[test]
fn duality_with_indexed_engine() {
    let s = gen(&SourceSpec::symmetric_markov(0.2), 20_000, 3).unwrap();
    let index = MatchIndex::new(s.symbols(), 2, 4096);
    let mut rng = SeededStream::new(3, 9);
    for _ in 0..2000 {
        let i = 4096 + (rng.next_u64() % 15_000) as usize;
        let m = 1 + (rng.next_u64() % 4096) as usize;
        let n = 1 + (rng.next_u64() % 30) as usize;
        let l = index.match_length(i, m).length;
        assert_eq!(l, match_length(&s, i, m).unwrap().length);
        let r = recurrence_time(&s, i, n, i).unwrap();
        assert_eq!(r.value().is_none_or(|r| r > m as u64), l < n);
    }
}

#[test]
fn monotonicity() {
    let s = gen(&SourceSpec::fair_coin(), 1 << 14, 4).unwrap();
    for i in [5000usize, 9000, 12000] {
        let rs: Vec<u64> = (1..=12).map(|n| recurrence_time(&s, i, n, i).unwrap().value().unwrap_or(u64::MAX)).collect();
        assert!(rs.windows(2).all(|w| w[0] <= w[1]), "{rs:?}");
        let ls: Vec<usize> = [1, 4, 16, 64, 256, 1024, 4096].iter().map(|&m| match_length(&s, i, m).unwrap().length).collect();
        assert!(ls.windows(2).all(|w| w[0] <= w[1]), "{ls:?}");
    }
}

#[test]
fn window_examples() {
    let s = seq(&[0, 1, 0, 1, 0, 1, 0, 1, 0, 1], 2);
    let r = longest_match_in_window(&s, 4, 0, 4, 6, true).unwrap();
    assert_eq!((r.found, r.offset, r.length), (true, 0, 6));
    let s = seq(&[1, 1, 0, 0, 0, 1], 2);
    let r = longest_match_in_window(&s, 4, 0, 4, 2, true).unwrap();
    assert_eq!((r.found, r.offset, r.length), (true, 2, 1));
    assert!(longest_match_in_window(&s, 4, 0, 0, 2, true).is_err());
}

#[test]
fn indexed_engine_matches_naive() {
    for alphabet in [2usize, 4] {
        let probs = vec![1.0 / alphabet as f64; alphabet];
        for (k, spec) in [SourceSpec::iid(&probs), SourceSpec::periodic(&[0, 1, 1])].iter().enumerate() {
            let s = gen_stream(spec, 30_000, 1, (alphabet * 10 + k) as u64).unwrap();
            let x = s.symbols();
            let index = MatchIndex::new(x, s.alphabet_size(), 2048);
            let mut rng = SeededStream::new(alphabet as u64, k as u64);
            for _ in 0..1000 {
                let pos = 1 + (rng.next_u64() % 29_000) as usize;
                let wl = 1 + (rng.next_u64() % pos.min(3000) as u64) as usize;
                let ws = pos - wl - (rng.next_u64() % (pos - wl + 1) as u64) as usize;
                let max_len = 1 + (rng.next_u64() % (x.len() - pos).min(400) as u64) as usize;
                let overlap = rng.next_u64() % 2 == 0;
                assert_eq!(
                    index.longest_match(pos, ws, wl, max_len, overlap),
                    longest_match_naive(x, pos, ws, wl, max_len, overlap),
                    "alphabet {alphabet}, pos {pos}, window {ws}+{wl}, max {max_len}"
                );
            }
        }
    }
}

#[test]
fn lz78_trace_and_counts() {
    let p = gen(&SourceSpec::periodic(&[0, 1]), 30, 0).unwrap();
    let parse = lz78_parse(&p).unwrap();
    let words: Vec<String> =
        parse.words(p.symbols()).iter().map(|w| w.iter().map(|s| char::from(b'0' + s)).collect()).collect();
    assert_eq!(words, ["0", "1", "01", "010", "10", "101", "0101", "01010", "1010", "10101"]);
    assert_eq!(parse.c(), 10);

    let unary = seq(&[0; 10], 1);
    let parse = lz78_parse(&unary).unwrap();
    assert_eq!(parse.phrases.iter().map(|p| p.length).collect::<Vec<_>>(), [1, 2, 3, 4]);
    assert_eq!(parse.c(), 4);

    let long = gen(&SourceSpec::periodic(&[0, 1]), 10_000, 0).unwrap();
    let ratio = lz78_parse(&long).unwrap().c() as f64 / 100.0;
    assert!((1.9..=2.1).contains(&ratio), "{ratio}");
}

#[test]
fn profile_invariants() {
    let s = gen(&SourceSpec::golden_sturmian(), 1 << 15, 0).unwrap();
    let p = RecurrenceProfile::compute(&s, 20_000..20_050, &[1, 2, 3, 5, 8, 13, 21, 34], 1 << 14).unwrap();
    p.verify(s.symbols()).unwrap();
    for sample in &p.samples {
        if let Some(r) = sample.value.value() {
            assert!(r >= 1 && r as usize <= sample.lookback);
        }
    }
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("position,n,value,censored,lookback\n"));
}

proptest! {
    #[test]
    fn lz78_phrases_are_distinct_extensions(x in prop::collection::vec(0u8..3, 1..400)) {
        let s = seq(&x, 3);
        let parse = lz78_parse(&s).unwrap();
        let words = parse.words(&x);
        let complete = &words[..parse.phrases.len()];
        let mut seen = std::collections::HashSet::new();
        for (w, p) in complete.iter().zip(&parse.phrases) {
            prop_assert!(seen.insert(w.clone()));
            match p.parent {
                None => prop_assert_eq!(w.len(), 1),
                Some(q) => prop_assert_eq!(&complete[q][..], &w[..w.len() - 1]),
            }
        }
        prop_assert_eq!(words.concat(), x);
    }

    #[test]
    fn duality_on_arbitrary_strings(x in prop::collection::vec(0u8..2, 2..200), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let s = seq(&x, 2);
        let i = 1 + (a % (x.len() as u64 - 1)) as usize;
        let n = 1 + (b % (x.len() - i) as u64) as usize;
        let m = 1 + (c % i as u64) as usize;
        let r = recurrence_time(&s, i, n, i).unwrap();
        let l = match_length(&s, i, m).unwrap().length;
        prop_assert_eq!(r.value().is_none_or(|r| r > m as u64), l < n);
    }
}
