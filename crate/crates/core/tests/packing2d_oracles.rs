use hardcore_rsa::packing2d::{
    run_ghost_2d, saturate_classical_2d, Geometry2D, Packing2DState, Rect, RectRegion,
};
use hardcore_rsa::rng::RngStream;
use hardcore_rsa::stats::{chi_squared_two_sample, TrialSummary};
use proptest::prelude::*;

fn exclusion(c: (f64, f64)) -> Rect {
    Rect::new(c.0 - 2.0, c.1 - 2.0, c.0 + 2.0, c.1 + 2.0)
}

/// Every candidate drawn uniformly from the whole domain of centres; run until
/// the region of admissible centres has zero area.
fn literal(length: f64, ghost: bool, rng: &mut RngStream) -> usize {
    let domain = Rect::new(1.0, 1.0, length - 1.0, length - 1.0);
    let mut forbidden = RectRegion::new();
    let mut placed = 0;
    while forbidden.complement_area(&domain) > 1e-12 {
        let c = (rng.uniform_in(1.0, length - 1.0), rng.uniform_in(1.0, length - 1.0));
        let free = !forbidden.contains_open(c.0, c.1);
        if free {
            placed += 1;
        }
        if free || ghost {
            if let Some(r) = exclusion(c).intersect(&domain) {
                if !forbidden.covers(&r) {
                    forbidden.push(r);
                }
            }
        }
    }
    placed
}

#[test]
fn classical_matches_literal_rejection_sampler() {
    let a: Vec<u64> = (0..2000)
        .map(|t| saturate_classical_2d(7.0, &mut RngStream::new(51, t)).unwrap().count() as u64)
        .collect();
    let b: Vec<u64> = (0..2000)
        .map(|t| literal(7.0, false, &mut RngStream::new(52, t)) as u64)
        .collect();
    let p = chi_squared_two_sample(&a, &b, 10).p_value;
    assert!(p > 1e-3, "p = {p}");
}

#[test]
fn ghost_matches_literal_process() {
    // L = 9 gives a 3×3 cell grid, so the active-cell thinning is exercised.
    let a: Vec<u64> = (0..2000)
        .map(|t| run_ghost_2d(9.0, &mut RngStream::new(53, t), Geometry2D::Boxed).unwrap().count() as u64)
        .collect();
    let b: Vec<u64> = (0..2000)
        .map(|t| literal(9.0, true, &mut RngStream::new(54, t)) as u64)
        .collect();
    let p = chi_squared_two_sample(&a, &b, 10).p_value;
    assert!(p > 1e-3, "p = {p}");
}

fn strip_count(s: &Packing2DState, lo: f64, hi: f64) -> f64 {
    s.centers.iter().filter(|c| c.0 >= lo && c.0 < hi).count() as f64
}

#[test]
fn torus_has_no_seam() {
    let states: Vec<Packing2DState> = (0..1500)
        .map(|t| run_ghost_2d(12.0, &mut RngStream::new(55, t), Geometry2D::Torus).unwrap())
        .collect();
    assert!(states.iter().all(|s| s.is_valid()));
    // Strip straddling the seam versus a strip in the middle.
    let seam: Vec<f64> = states
        .iter()
        .map(|s| strip_count(s, 11.0, 12.0) + strip_count(s, 0.0, 1.0))
        .collect();
    let middle: Vec<f64> = states.iter().map(|s| strip_count(s, 5.0, 7.0)).collect();
    let diff: Vec<f64> = seam.iter().zip(&middle).map(|(a, b)| a - b).collect();
    let d = TrialSummary::from_samples("diff", 12.0, 55, &diff);
    assert!(d.z_score(0.0).abs() <= 3.5, "{d:?}");
}

fn arb_rect() -> impl Strategy<Value = Rect> {
    (0.0f64..10.0, 0.0f64..10.0, 0.05f64..6.0, 0.05f64..6.0).prop_map(|(x, y, w, h)| Rect::new(x, y, x + w, y + h))
}

proptest! {
    #[test]
    fn union_area_is_bounded(rects in prop::collection::vec(arb_rect(), 1..8)) {
        let region = RectRegion { rects: rects.clone() };
        let area = region.area();
        let sum: f64 = rects.iter().map(|r| r.area()).sum();
        let max = rects.iter().map(|r| r.area()).fold(0.0, f64::max);
        prop_assert!(area <= sum + 1e-9 && area >= max - 1e-9);
    }

    #[test]
    fn complement_and_union_tile_the_bounds(rects in prop::collection::vec(arb_rect(), 0..8)) {
        let region = RectRegion { rects };
        let b = Rect::new(1.0, 2.0, 9.0, 8.0);
        prop_assert!((region.complement_area(&b) + region.area_within(&b) - b.area()).abs() < 1e-9);
    }

    #[test]
    fn sampled_points_are_free(rects in prop::collection::vec(arb_rect(), 0..6), seed in any::<u64>()) {
        let region = RectRegion { rects };
        let b = Rect::new(0.0, 0.0, 12.0, 12.0);
        let mut rng = RngStream::new(seed, 0);
        if let Some((x, y)) = region.sample_complement(&b, &mut rng) {
            prop_assert!(!region.contains_open(x, y));
            prop_assert!(b.x0 <= x && x <= b.x1 && b.y0 <= y && y <= b.y1);
        }
    }
}
