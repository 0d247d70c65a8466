use lzlab::ldp::{estimator_tail, materialize_trial, rate_fit, tail_probability, trial_recurrence, Tail};
use lzlab::sources::{true_entropy, SourceSpec};
use lzlab::LabError;

fn asymmetric_markov() -> SourceSpec {
    SourceSpec::Markov { trans: vec![vec![0.9, 0.1], vec![0.4, 0.6]], init: vec![0.8, 0.2] }
}

#[test]
fn capped_scan_matches_brute_force() {
    for spec in [SourceSpec::fair_coin(), SourceSpec::symmetric_markov(0.3), asymmetric_markov()] {
        let h = true_entropy(&spec).unwrap();
        for n in [2usize, 5, 8, 10] {
            let cap = (2.0 * (n as f64 * (h + 0.3)).exp2()).ceil() as u64;
            for trial in 0..1000 / 4 {
                let y = materialize_trial(&spec, n, trial, 7, n + cap as usize).unwrap();
                let brute = (1..=cap).find(|&l| y[l as usize..l as usize + n] == y[..n]);
                assert_eq!(trial_recurrence(&spec, n, trial, 7, cap).unwrap(), brute, "n = {n}, trial {trial}");
            }
        }
    }
}

#[test]
fn reversed_walk_is_stationary() {
    let y = materialize_trial(&asymmetric_markov(), 4, 0, 1, 400_000).unwrap();
    let zeros = y.iter().filter(|&&s| s == 0).count() as f64 / y.len() as f64;
    assert!((zeros - 0.8).abs() < 0.01, "{zeros}");
    // The reversed chain of a two-state chain is the chain itself.
    let pairs = y.windows(2).filter(|w| w[0] == 0).count() as f64;
    let stay = y.windows(2).filter(|w| w == &[0, 0]).count() as f64;
    assert!((stay / pairs - 0.9).abs() < 0.01);
}

#[test]
fn cells_agree_with_single_trials() {
    let spec = SourceSpec::symmetric_markov(0.3);
    let h = true_entropy(&spec).unwrap();
    let est = tail_probability(&spec, &[4, 7], &[0.1, 0.3], 1000, 5).unwrap();
    for &n in &[4usize, 7] {
        let cap = (2.0 * (n as f64 * (h + 0.3)).exp2()).ceil() as u64;
        let r: Vec<Option<u64>> = (0..1000).map(|t| trial_recurrence(&spec, n, t, 5, cap).unwrap()).collect();
        for &eps in &[0.1, 0.3] {
            let up = r.iter().filter(|v| v.is_none_or(|v| v as f64 > (n as f64 * (h + eps)).exp2())).count();
            let lo = r.iter().filter(|v| v.is_some_and(|v| (v as f64) < (n as f64 * (h - eps)).exp2())).count();
            assert_eq!(est.cell(n, eps, Tail::Upper).unwrap().events, up as u64);
            assert_eq!(est.cell(n, eps, Tail::Lower).unwrap().events, lo as u64);
        }
    }
}

#[test]
fn tails_nest_in_eps() {
    let eps = [0.05, 0.1, 0.2, 0.3, 0.4];
    let est = tail_probability(&SourceSpec::fair_coin(), &[4, 8, 12], &eps, 2000, 3).unwrap();
    for &n in &est.n_grid {
        for tail in [Tail::Upper, Tail::Lower] {
            let p: Vec<f64> = eps.iter().map(|&e| est.cell(n, e, tail).unwrap().p_hat).collect();
            assert!(p.windows(2).all(|w| w[1] <= w[0]), "n = {n} {tail:?}: {p:?}");
        }
        for &e in &eps {
            let c = est.cell(n, e, Tail::Upper).unwrap();
            assert!(c.ci_lo <= c.p_hat && c.p_hat <= c.ci_hi);
        }
    }
}

#[test]
fn deterministic_given_seed() {
    let spec = SourceSpec::symmetric_markov(0.3);
    let a = tail_probability(&spec, &[5, 9], &[0.2], 1000, 42).unwrap();
    let b = tail_probability(&spec, &[5, 9], &[0.2], 1000, 42).unwrap();
    assert_eq!(a, b);
    let c = tail_probability(&spec, &[5, 9], &[0.2], 1000, 43).unwrap();
    assert_ne!(a.cells, c.cells);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.write_csv(&mut x).unwrap();
    b.write_csv(&mut y).unwrap();
    assert_eq!(x, y);
    assert!(String::from_utf8(x).unwrap().starts_with("n,eps,tail,p_hat,ci_lo,ci_hi,trials,censored\n"));
}

#[test]
fn markov_tails_decay() {
    let spec = SourceSpec::symmetric_markov(0.3);
    let n_grid = [6, 9, 12, 15];
    let est = tail_probability(&spec, &n_grid, &[0.25, 0.35], 2000, 1).unwrap();
    for eps in [0.25, 0.35] {
        for tail in [Tail::Upper, Tail::Lower] {
            let p = est.series(eps, tail);
            assert!(p.windows(2).all(|w| w[1] < w[0]), "{eps} {tail:?}: {p:?}");
            let fit = est.fit(eps, tail).unwrap().fit.as_ref().unwrap();
            assert!(fit.rate > 0.0 && fit.r2 >= 0.8, "{eps} {tail:?}: {fit:?}");
        }
        let up = est.fit(eps, Tail::Upper).unwrap().fit.as_ref().unwrap().rate;
        let lo = est.fit(eps, Tail::Lower).unwrap().fit.as_ref().unwrap().rate;
        assert_eq!(est.rate_function(eps).unwrap(), up.min(lo));
    }
    assert!(est.rate_function(0.25).unwrap() < est.rate_function(0.35).unwrap());
}

#[test]
fn estimator_tail_is_bounded_by_single_block_tails() {
    let spec = SourceSpec::symmetric_markov(0.3);
    let n_grid = [8, 10, 12];
    let q = |n: usize| n * n;
    let j = estimator_tail(&spec, &n_grid, 0.2, q, 1000, 2).unwrap();
    let single = tail_probability(&spec, &n_grid, &[0.2], 1000, 2).unwrap();
    for &n in &n_grid {
        let pj = j.cell(n, 0.2, Tail::Estimator).unwrap().p_hat;
        let ps = single.cell(n, 0.2, Tail::Upper).unwrap().p_hat + single.cell(n, 0.2, Tail::Lower).unwrap().p_hat;
        assert!(pj <= q(n) as f64 * ps, "n = {n}: {pj} vs {ps}");
        assert!(pj < ps, "n = {n}: {pj} vs {ps}");
    }
    let pj = j.series(0.2, Tail::Estimator);
    assert!(pj.windows(2).all(|w| w[1] < w[0]), "{pj:?}");
}

#[test]
fn periodic_estimator_tail_is_exact() {
    let spec = SourceSpec::periodic(&[0, 1]);
    let est = estimator_tail(&spec, &[4, 8, 9, 12, 20], 0.1, |n| n * n, 1000, 0).unwrap();
    // J_n = 1/n exactly, so the event |J_n| > 0.1 holds for n < 10 only.
    assert_eq!(est.series(0.1, Tail::Estimator), vec![1.0, 1.0, 1.0, 0.0, 0.0]);
}

#[test]
fn unsupported_sources_and_guards() {
    let rotation = SourceSpec::golden_sturmian();
    assert!(matches!(tail_probability(&rotation, &[4], &[0.1], 10, 0), Err(LabError::Refused(_))));
    assert!(matches!(estimator_tail(&rotation, &[4], 0.1, |n| n, 10, 0), Err(LabError::Refused(_))));
    assert!(matches!(
        tail_probability(&SourceSpec::periodic(&[0, 1]), &[4], &[0.1], 10, 0),
        Err(LabError::Refused(_))
    ));
    let periodic_chain = SourceSpec::Markov { trans: vec![vec![0.0, 1.0], vec![1.0, 0.0]], init: vec![0.5, 0.5] };
    assert!(matches!(tail_probability(&periodic_chain, &[4], &[0.1], 10, 0), Err(LabError::Refused(_))));
    assert!(matches!(tail_probability(&SourceSpec::fair_coin(), &[30], &[0.3], 10, 0), Err(LabError::Refused(_))));
    let wide = SourceSpec::iid(&[0.25; 4]);
    assert!(matches!(tail_probability(&wide, &[33], &[0.01], 10, 0), Err(LabError::Refused(_))));
    assert!(tail_probability(&SourceSpec::fair_coin(), &[4], &[], 1000, 0).is_err());
    assert!(matches!(tail_probability(&SourceSpec::fair_coin(), &[4], &[0.1], 999, 0), Err(LabError::InvalidArgument(_))));
}

#[test]
fn lower_tail_at_eps_equal_to_entropy_is_empty() {
    let est = tail_probability(&SourceSpec::fair_coin(), &[4, 8, 12], &[1.0], 1000, 6).unwrap();
    assert_eq!(est.series(1.0, Tail::Lower), vec![0.0; 3]);
}

#[test]
fn fair_coin_estimator_tail_does_not_increase() {
    let est = estimator_tail(&SourceSpec::fair_coin(), &[8, 12, 16], 0.3, |n| n * n, 1000, 4).unwrap();
    let p = est.series(0.3, Tail::Estimator);
    assert!(p.windows(2).all(|w| w[1] <= w[0]), "{p:?}");
}

#[test]
fn rate_fit_examples() {
    let n = [4, 8, 12, 16];
    let p: Vec<f64> = n.iter().map(|&k| 0.9 * (-0.25 * k as f64).exp()).collect();
    let f = rate_fit(&n, &p).unwrap();
    assert!((f.rate - 0.25).abs() < 1e-12);
    assert!((f.intercept - 0.9f64.ln()).abs() < 1e-12);
    assert!(f.band.0 <= f.rate && f.rate <= f.band.1);
    assert!(matches!(rate_fit(&n, &[0.1, 0.01, 0.0, 0.0]), Err(LabError::Refused(_))));
    assert!(matches!(rate_fit(&[4, 8, 12, 16, 20], &[0.5, 0.1, 0.0, 0.0, 0.0]), Err(LabError::Refused(_))));
    let g = rate_fit(&n, &[0.3, 0.1, 0.02, 0.0]).unwrap();
    assert_eq!(g.dropped, vec![16]);
    assert!(g.flagged());
    assert!(rate_fit(&n, &[0.3, 1.2, 0.1, 0.1]).is_err());
}
