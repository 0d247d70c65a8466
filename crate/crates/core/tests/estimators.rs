use lzlab::estimators::{
    entropy_matchlength, entropy_recurrence, entropy_recurrence_default, match_series, ow2_trend, EstimatorRun, GFn,
};
use lzlab::sources::{gen, true_entropy, SourceSpec};
use lzlab::stats::mean;
use lzlab::LabError;

#[test]
fn periodic_estimate_is_exactly_one_over_n() {
    let s = gen(&SourceSpec::periodic(&[0, 1]), 5000, 0).unwrap();
    for n in [1, 7, 24, 40] {
        let run = entropy_recurrence_default(&s, n, 2000).unwrap();
        assert_eq!(run.j_n, 1.0 / n as f64);
        assert!(!run.unreliable);
    }
}

#[test]
fn markov_estimate_near_entropy() {
    let spec = SourceSpec::symmetric_markov(0.3);
    let h = true_entropy(&spec).unwrap();
    let history = 1 << 25;
    let s = gen(&spec, history + 24 * 24 + 24, 11).unwrap();
    let run = entropy_recurrence_default(&s, 24, history).unwrap();
    assert!(!run.unreliable, "{} censored", run.censored_count);
    assert!((run.j_n - h).abs() <= 0.07, "{}", run.j_n);
}

#[test]
fn spread_shrinks_with_more_anchors() {
    let spec = SourceSpec::symmetric_markov(0.3);
    let n = 12;
    let history = 1 << 16;
    let spread = |q: usize| {
        let values: Vec<f64> = (0..30u64)
            .map(|seed| entropy_recurrence(&gen(&spec, history + q + n, seed).unwrap(), n, q, history).unwrap().j_n)
            .collect();
        let m = mean(&values);
        values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64
    };
    let v: Vec<f64> = [4, 64, 1024].into_iter().map(spread).collect();
    assert!(v[0] > v[1] && v[1] > v[2], "{v:?}");
}

#[test]
fn recurrence_and_match_estimates_agree() {
    let spec = SourceSpec::symmetric_markov(0.3);
    let s = gen(&spec, 1 << 21, 5).unwrap();
    let j = entropy_recurrence(&s, 16, 4096, 1 << 20).unwrap().j_n;
    let m = entropy_matchlength(&s, &[1 << 16], 4096).unwrap().points[0].estimate;
    assert!((j - m).abs() <= 0.1, "J = {j}, match = {m}");
}

#[test]
fn fair_coin_match_length_estimate() {
    let s = gen(&SourceSpec::fair_coin(), (1 << 16) + 5000, 8).unwrap();
    let series = entropy_matchlength(&s, &[1 << 16], 5000).unwrap();
    let e = series.points[0].estimate;
    assert!((0.85..=1.15).contains(&e), "{e}");
}

#[test]
fn periodic_match_estimate_vanishes() {
    let s = gen(&SourceSpec::periodic(&[0, 1]), 1 << 14, 0).unwrap();
    let series = entropy_matchlength(&s, &[4, 64, 1024], 100).unwrap();
    for p in &series.points {
        assert_eq!(p.capped, 100);
        assert!(p.estimate < 0.001, "{p:?}");
    }
}

#[test]
fn trend_needs_three_points() {
    let s = gen(&SourceSpec::golden_sturmian(), 1 << 12, 0).unwrap();
    assert!(matches!(ow2_trend(&s, GFn::Log, &[16, 64], 100, 1.0), Err(LabError::Refused(_))));
    let t = ow2_trend(&s, GFn::Log, &[16, 64, 256], 100, 1.0).unwrap();
    assert_eq!(t.series.points.len(), 3);
    assert_eq!(t.convergence(), t.last_distance - t.first_distance);
}

#[test]
fn fair_coin_linear_trend_targets_one() {
    let s = gen(&SourceSpec::fair_coin(), (1 << 16) + 4000, 3).unwrap();
    let t = ow2_trend(&s, GFn::Linear, &[1 << 8, 1 << 12, 1 << 16], 4000, 1.0).unwrap();
    assert!(t.last_distance < 0.15, "{t:?}");
}

#[test]
fn series_share_anchors() {
    let s = gen(&SourceSpec::symmetric_markov(0.3), 1 << 14, 2).unwrap();
    let a = match_series(&s, &[16, 256, 4096], 500, GFn::Log).unwrap();
    let b = match_series(&s, &[16, 256, 4096], 500, GFn::Linear).unwrap();
    assert_eq!(a.first_anchor, 4096);
    for (p, q) in a.points.iter().zip(&b.points) {
        assert_eq!(p.mean_length, q.mean_length);
    }
    assert!(a.points.windows(2).all(|w| w[0].mean_length <= w[1].mean_length));
}

#[test]
fn short_history_is_flagged() {
    let s = gen(&SourceSpec::fair_coin(), 400, 1).unwrap();
    let run = entropy_recurrence(&s, 20, 50, 300).unwrap();
    assert!(run.unreliable);
    assert!(run.censored_count > 10);
    let mut buf = Vec::new();
    EstimatorRun::write_csv(&[(1, run)], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("seed,n,q,history,j_n,values,censored,unreliable\n"));
    assert!(matches!(entropy_recurrence(&s, 20, 50, 1000), Err(LabError::Bounds(_))));
}
