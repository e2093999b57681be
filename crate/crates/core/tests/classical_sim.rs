use hardcore_rsa::classical::{saturate_naive, saturate_split, BoundaryGaps, ROD_LENGTH};
use hardcore_rsa::harness::cross_validate;
use hardcore_rsa::recurrence;
use hardcore_rsa::rng::RngStream;
use hardcore_rsa::stats::{chi_squared_two_sample, TrialSummary};
use proptest::prelude::*;

fn gap_counts(length: f64, r: f64, trials: u64, seed: u64) -> TrialSummary {
    let xs: Vec<f64> = (0..trials)
        .map(|t| saturate_split(length, &mut RngStream::new(seed, t)).count_gaps_at_least(r) as f64)
        .collect();
    TrialSummary::from_samples("gap_count_at", length, seed, &xs)
}

#[test]
fn solved_gap_counts_match_simulation() {
    for (r, l) in [(1.0, 10.0), (1.0, 20.0), (1.5, 20.0)] {
        let table = recurrence::solve_gap_expectation(r, 20.0, 0.01).unwrap();
        let mc = gap_counts(l, r, 100_000, 31);
        let z = mc.z_score(table.value_at(l).unwrap());
        assert!(z.abs() <= 3.0, "r = {r}, L = {l}: z = {z}");
    }
}

#[test]
fn second_moment_bound_dominates_simulation() {
    let s = recurrence::solve_second_moment_bound(1.0, 10.0, 0.01).unwrap();
    let sq: Vec<f64> = (0..100_000)
        .map(|t| {
            let g = saturate_split(10.0, &mut RngStream::new(32, t)).count_gaps_at_least(1.0) as f64;
            g * g
        })
        .collect();
    let mc = TrialSummary::from_samples("g2", 10.0, 32, &sq);
    assert!(mc.mean <= s.value_at(10.0).unwrap() + 3.0 * mc.standard_error());
}

#[test]
fn split_and_naive_agree_on_rod_counts() {
    let a: Vec<u64> = (0..4000)
        .map(|t| saturate_split(9.0, &mut RngStream::new(33, t)).rod_count() as u64)
        .collect();
    let b: Vec<u64> = (0..4000)
        .map(|t| saturate_naive(9.0, &mut RngStream::new(34, t)).unwrap().rod_count() as u64)
        .collect();
    assert!(chi_squared_two_sample(&a, &b, 10).p_value > 1e-3);
}

#[test]
fn cross_validation_examples() {
    let cv = cross_validate(1.0, 10.0, 100_000, 35, true).unwrap();
    assert!(cv.pass, "{cv:?}");
    let tail = cross_validate(1.99, 100.0, 20_000, 36, true).unwrap();
    assert!(tail.pass, "{tail:?}");
    assert!(tail.solver_value < 1.0);
    let c = recurrence::limit_coefficient_c(1.99, Default::default()).unwrap().value;
    assert!((tail.solver_value / 102.0 - c).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_packings_are_saturated(length in 0.0f64..80.0, seed in any::<u64>()) {
        let s = saturate_split(length, &mut RngStream::new(seed, 0));
        prop_assert!(s.is_valid());
        prop_assert!(s.max_gap(BoundaryGaps::Include) < ROD_LENGTH);
        let covered = ROD_LENGTH * s.rod_count() as f64;
        let free: f64 = s.gaps().iter().map(|g| g.length).sum();
        prop_assert!((covered + free - length).abs() < 1e-9);
    }

    #[test]
    fn naive_packings_are_saturated(length in 2.0f64..20.0, seed in any::<u64>()) {
        let s = saturate_naive(length, &mut RngStream::new(seed, 1)).unwrap();
        prop_assert!(s.is_valid());
        prop_assert!(s.max_gap(BoundaryGaps::Include) < ROD_LENGTH + 1e-9);
        prop_assert!(s.rod_count() >= 1);
    }
}
