use hardcore_rsa::analytics;
use hardcore_rsa::ghost::{
    run_ghost_circle, run_ghost_circle_naive, run_ghost_interval, success_frequencies, GhostMode,
};
use hardcore_rsa::rng::RngStream;
use hardcore_rsa::stats::{chi_squared_two_sample, ks_two_sample};
use proptest::prelude::*;

#[test]
fn acceptance_frequencies_follow_success_probability() {
    let trials = 20_000;
    let freq = success_frequencies(20.0, 6, trials, 41).unwrap();
    for (k, f) in freq.iter().enumerate() {
        let p = analytics::success_prob(k as u64 + 1, 20.0).unwrap();
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((f - p).abs() <= 4.0 * se, "t = {}: {f} vs {p}", k + 1);
    }
}

#[test]
fn circle_cut_matches_literal_process() {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let (mut ga, mut gb) = (Vec::new(), Vec::new());
    for t in 0..3000 {
        let x = run_ghost_circle(15.0, &mut RngStream::new(42, t)).unwrap();
        let y = run_ghost_circle_naive(15.0, &mut RngStream::new(43, t)).unwrap();
        a.push(x.rod_count() as u64);
        b.push(y.rod_count() as u64);
        ga.push(x.max_gap());
        gb.push(y.max_gap());
    }
    assert!(chi_squared_two_sample(&a, &b, 10).p_value > 1e-3);
    assert!(ks_two_sample(&ga, &gb).p_value > 1e-3);
}

#[test]
fn naive_and_accelerated_interval_agree() {
    let run = |mode, seed| -> Vec<u64> {
        (0..2000)
            .map(|t| run_ghost_interval(18.0, &mut RngStream::new(seed, t), mode).unwrap().rod_count() as u64)
            .collect()
    };
    let p = chi_squared_two_sample(&run(GhostMode::Naive, 44), &run(GhostMode::Accelerated, 45), 10).p_value;
    assert!(p > 1e-3);
}

#[test]
fn circle_mean_is_a_quarter_of_length() {
    let n = 5000;
    let xs: Vec<f64> = (0..n)
        .map(|t| run_ghost_circle(30.0, &mut RngStream::new(46, t)).unwrap().rod_count() as f64)
        .collect();
    let m = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((m - 7.5).abs() <= 3.0 * (var / n as f64).sqrt(), "{m}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_runs_terminate_valid(length in 0.5f64..60.0, seed in any::<u64>()) {
        let s = run_ghost_interval(length, &mut RngStream::new(seed, 0), GhostMode::Accelerated).unwrap();
        prop_assert!(s.is_valid());
        prop_assert!(s.interior_gaps().iter().all(|g| g.length >= 0.0));
        let covered = 2.0 * s.rod_count() as f64 + s.gaps().iter().map(|g| g.length).sum::<f64>();
        prop_assert!((covered - length).abs() < 1e-9);
    }

    #[test]
    fn circle_runs_terminate_valid(length in 4.5f64..60.0, seed in any::<u64>()) {
        let s = run_ghost_circle(length, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert!(s.is_valid());
        prop_assert!(s.rod_count() >= 1);
    }
}
