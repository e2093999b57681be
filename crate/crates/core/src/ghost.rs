//! The one-dimensional ghost hard-core process.
//!
//! Every candidate, accepted or not, permanently ghosts its exclusion window
//! `(x - 1, x + 1)`. A candidate is accepted only if that window misses the
//! ghosted set `Y` (and, on an interval, the rod fits inside `[0, L]`). The run
//! ends once no component of `[0, L] \ Y` has length 2 or more.
//!
//! Two samplers are provided. `Naive` draws candidates uniformly from the
//! whole geometry, exactly as the process is stated. `Accelerated` draws only
//! effective candidates, uniformly on the active region (the complement of
//! `Y` dilated by 1); a candidate whose window already lies inside `Y` is a
//! no-op, so skipping it leaves the law of the terminal state unchanged.

use serde::{Deserialize, Serialize};

use crate::classical::{gaps_between, GapRecord};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rng::RngStream;

pub const CANDIDATE_BUDGET: u64 = 1_000_000_000;
const HALF_ROD: f64 = 1.0;
const ROD: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Interval,
    Circle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GhostMode {
    Naive,
    #[default]
    Accelerated,
}

#[derive(Clone, Debug)]
pub struct GhostState {
    pub geometry: Geometry,
    pub length: f64,
    /// Ghosted region `Y` in the coordinates of `[0, L]`.
    pub ghosted: IntervalSet,
    /// Sorted centers of accepted rods.
    pub rods: Vec<f64>,
    /// Naive mode: every candidate drawn. Accelerated mode: effective candidates only.
    pub candidates_seen: u64,
    pub accepted: u64,
    /// Naive mode only: the candidate index `t` (1-based) at which each rod was accepted.
    pub acceptance_times: Option<Vec<u64>>,
}

impl GhostState {
    pub fn rod_count(&self) -> usize {
        self.rods.len()
    }

    /// All maximal empty segments. On the circle every gap is interior and the
    /// wrap-around gap is reported with `hi > L`.
    pub fn gaps(&self) -> Vec<GapRecord> {
        match self.geometry {
            Geometry::Interval => gaps_between(
                self.length,
                self.rods.iter().map(|&c| (c - HALF_ROD, c + HALF_ROD)),
            ),
            Geometry::Circle => {
                let mut out = self.interior_gaps();
                if let (Some(&first), Some(&last)) = (self.rods.first(), self.rods.last()) {
                    let lo = last + HALF_ROD;
                    let hi = first - HALF_ROD + self.length;
                    if hi > lo {
                        out.push(GapRecord {
                            lo,
                            hi,
                            length: hi - lo,
                            touches_boundary: false,
                        });
                    }
                }
                out
            }
        }
    }

    /// Gaps between adjacent accepted rods (boundary segments excluded).
    pub fn interior_gaps(&self) -> Vec<GapRecord> {
        self.rods
            .windows(2)
            .filter_map(|w| {
                let lo = w[0] + HALF_ROD;
                let hi = w[1] - HALF_ROD;
                (hi > lo).then_some(GapRecord {
                    lo,
                    hi,
                    length: hi - lo,
                    touches_boundary: false,
                })
            })
            .collect()
    }

    /// Largest gap between adjacent rods (wrap-around included on the circle).
    pub fn max_gap(&self) -> f64 {
        let gaps = match self.geometry {
            Geometry::Interval => self.interior_gaps(),
            Geometry::Circle => self.gaps(),
        };
        gaps.iter().map(|g| g.length).fold(0.0, f64::max)
    }

    /// Whether `x` is covered by an accepted rod.
    pub fn covers(&self, x: f64) -> bool {
        let idx = self.rods.partition_point(|&c| c < x);
        let near = |c: f64| {
            let d = match self.geometry {
                Geometry::Interval => (x - c).abs(),
                Geometry::Circle => circle_distance(x, c, self.length),
            };
            d < HALF_ROD
        };
        let n = self.rods.len();
        if n == 0 {
            return false;
        }
        let mut probe = vec![idx % n, (idx + n - 1) % n];
        if self.geometry == Geometry::Circle {
            probe.extend([0, n - 1]);
        }
        probe.into_iter().any(|i| near(self.rods[i]))
    }

    /// Checks the hard-core, containment and bookkeeping invariants.
    pub fn is_valid(&self) -> bool {
        let sorted = self.rods.windows(2).all(|w| w[0] <= w[1]);
        let apart = match self.geometry {
            Geometry::Interval => self.rods.windows(2).all(|w| w[1] - w[0] >= ROD),
            Geometry::Circle => {
                self.rods.windows(2).all(|w| w[1] - w[0] >= ROD - 1e-9)
                    && (self.rods.len() < 2
                        || self.rods[0] + self.length - self.rods[self.rods.len() - 1]
                            >= ROD - 1e-9)
            }
        };
        let inside = match self.geometry {
            Geometry::Interval => self
                .rods
                .iter()
                .all(|&c| c >= HALF_ROD && c <= self.length - HALF_ROD),
            Geometry::Circle => self.rods.iter().all(|&c| (0.0..self.length).contains(&c)),
        };
        sorted && apart && inside && self.accepted as usize == self.rods.len()
    }
}

pub(crate) fn circle_distance(a: f64, b: f64, length: f64) -> f64 {
    let d = (a - b).rem_euclid(length);
    d.min(length - d)
}

/// Runs the process on `[0, L]` to termination.
pub fn run_ghost_interval(length: f64, rng: &mut RngStream, mode: GhostMode) -> Result<GhostState> {
    if !(length > 0.0) {
        return Err(Error::precondition(format!(
            "interval length must be positive, got {length}"
        )));
    }
    match mode {
        GhostMode::Naive => run_interval_naive(length, rng),
        GhostMode::Accelerated => run_interval_accelerated(length, rng),
    }
}

fn has_live_component(y: &IntervalSet, domain: Interval) -> bool {
    y.complement_components(domain).iter().any(|c| c.len() >= ROD)
}

fn run_interval_naive(length: f64, rng: &mut RngStream) -> Result<GhostState> {
    let domain = Interval { lo: 0.0, hi: length };
    let mut y = IntervalSet::new();
    let mut rods = Vec::new();
    let mut times = Vec::new();
    let mut t = 0u64;
    let mut live = has_live_component(&y, domain);
    while live {
        if t >= CANDIDATE_BUDGET {
            return Err(Error::BudgetExhausted(CANDIDATE_BUDGET));
        }
        let x = rng.uniform_in(0.0, length);
        t += 1;
        let lo = (x - HALF_ROD).max(0.0);
        let hi = (x + HALF_ROD).min(length);
        if y.contains_interval(lo, hi) {
            continue;
        }
        let off_boundary = x >= HALF_ROD && x <= length - HALF_ROD;
        if off_boundary && !y.intersects_open(x - HALF_ROD, x + HALF_ROD) {
            rods.push(x);
            times.push(t);
        }
        y.insert_dilated(x, HALF_ROD, domain)?;
        live = has_live_component(&y, domain);
    }
    let mut order: Vec<usize> = (0..rods.len()).collect();
    order.sort_by(|&a, &b| rods[a].total_cmp(&rods[b]));
    let accepted = rods.len() as u64;
    Ok(GhostState {
        geometry: Geometry::Interval,
        length,
        ghosted: y,
        rods: order.iter().map(|&i| rods[i]).collect(),
        candidates_seen: t,
        accepted,
        acceptance_times: Some(order.iter().map(|&i| times[i]).collect()),
    })
}

/// Un-ghosted components with Fenwick-indexed active-region weights.
///
/// Components never merge, and an effective candidate touches exactly one of
/// them: two components are separated by a ghosted stretch of length at least
/// 2, so no window of length 2 can reach both.
struct Frontier {
    slots: Vec<Option<Interval>>,
    weights: Vec<f64>,
    tree: Vec<f64>,
    support: Interval,
    live: usize,
    updates: usize,
}

impl Frontier {
    fn new(initial: Interval, support: Interval, capacity: usize) -> Self {
        let mut f = Self {
            slots: Vec::with_capacity(capacity),
            weights: Vec::with_capacity(capacity),
            tree: vec![0.0; capacity + 1],
            support,
            live: 0,
            updates: 0,
        };
        f.push(initial);
        f
    }

    fn active(&self, c: &Interval) -> Interval {
        let lo = (c.lo - HALF_ROD).max(self.support.lo);
        let hi = (c.hi + HALF_ROD).min(self.support.hi);
        Interval { lo, hi: hi.max(lo) }
    }

    fn tree_add(&mut self, slot: usize, delta: f64) {
        let mut i = slot + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn rebuild(&mut self) {
        self.tree.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.weights.len() {
            let w = self.weights[i];
            self.tree_add(i, w);
        }
        self.updates = 0;
    }

    fn set_slot(&mut self, slot: usize, comp: Option<Interval>) {
        if let Some(old) = self.slots[slot] {
            if old.len() >= ROD {
                self.live -= 1;
            }
        }
        if let Some(c) = comp {
            if c.len() >= ROD {
                self.live += 1;
            }
        }
        let w = comp.map_or(0.0, |c| self.active(&c).len());
        let delta = w - self.weights[slot];
        self.weights[slot] = w;
        self.slots[slot] = comp;
        self.tree_add(slot, delta);
        self.updates += 1;
        if self.updates > 4 * self.slots.len() + 64 {
            self.rebuild();
        }
    }

    fn push(&mut self, comp: Interval) {
        if self.slots.len() + 1 >= self.tree.len() {
            let cap = 2 * self.tree.len();
            self.tree = vec![0.0; cap];
            self.slots.push(None);
            self.weights.push(0.0);
            self.rebuild();
        } else {
            self.slots.push(None);
            self.weights.push(0.0);
        }
        let slot = self.slots.len() - 1;
        self.set_slot(slot, Some(comp));
    }

    fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Draws an effective candidate: uniform on the union of active regions.
    fn sample(&self, rng: &mut RngStream) -> (usize, f64) {
        let total = self.tree_total();
        let target = rng.uniform() * total;
        if let Some((slot, offset)) = self.descend(target) {
            let act = self.active(self.slots[slot].as_ref().expect("weighted slot"));
            if offset < act.len() {
                return (slot, act.lo + offset);
            }
        }
        // Fenwick rounding sent the draw onto an empty slot; redraw with an exact scan.
        let mut target = rng.uniform() * self.total();
        let mut fallback = None;
        for (i, w) in self.weights.iter().enumerate() {
            if *w <= 0.0 {
                continue;
            }
            fallback = Some(i);
            if target < *w {
                let act = self.active(self.slots[i].as_ref().unwrap());
                return (i, act.lo + target);
            }
            target -= w;
        }
        let i = fallback.expect("frontier has positive weight");
        let act = self.active(self.slots[i].as_ref().unwrap());
        (i, rng.uniform_in(act.lo, act.hi))
    }

    fn tree_total(&self) -> f64 {
        let mut i = self.slots.len();
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    fn descend(&self, mut target: f64) -> Option<(usize, f64)> {
        let n = self.slots.len();
        let mut pos = 0usize;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        (pos < n && self.weights[pos] > 0.0).then_some((pos, target))
    }

    /// Removes `(x - 1, x + 1)` from the component in `slot`.
    fn carve(&mut self, slot: usize, x: f64) {
        let c = self.slots[slot].expect("occupied slot");
        let left = (x - HALF_ROD > c.lo).then(|| Interval {
            lo: c.lo,
            hi: (x - HALF_ROD).min(c.hi),
        });
        let right = (x + HALF_ROD < c.hi).then(|| Interval {
            lo: (x + HALF_ROD).max(c.lo),
            hi: c.hi,
        });
        match (left, right) {
            (Some(l), Some(r)) => {
                self.set_slot(slot, Some(l));
                self.push(r);
            }
            (Some(p), None) | (None, Some(p)) => self.set_slot(slot, Some(p)),
            (None, None) => self.set_slot(slot, None),
        }
    }
}

/// Shared accelerated loop over a line segment `domain` holding the
/// complement, with candidates supported on `support` and an optional
/// boundary window outside of which candidates are rejected outright.
fn run_frontier(
    domain: Interval,
    support: Interval,
    accept_window: Option<Interval>,
    rng: &mut RngStream,
    on_ghost: &mut dyn FnMut(f64),
) -> Result<(Vec<f64>, u64)> {
    let capacity = (domain.len() / ROD) as usize + 4;
    let mut frontier = Frontier::new(domain, support, capacity);
    let mut rods = Vec::new();
    let mut effective = 0u64;
    while frontier.live > 0 {
        if effective >= CANDIDATE_BUDGET {
            return Err(Error::BudgetExhausted(CANDIDATE_BUDGET));
        }
        let (slot, x) = frontier.sample(rng);
        effective += 1;
        let comp = frontier.slots[slot].expect("sampled slot is occupied");
        let in_window = accept_window.is_none_or(|w| x >= w.lo && x <= w.hi);
        if in_window && comp.lo <= x - HALF_ROD && x + HALF_ROD <= comp.hi {
            rods.push(x);
        }
        on_ghost(x);
        frontier.carve(slot, x);
    }
    Ok((rods, effective))
}

fn run_interval_accelerated(length: f64, rng: &mut RngStream) -> Result<GhostState> {
    let domain = Interval { lo: 0.0, hi: length };
    let mut y = IntervalSet::new();
    let window = Interval {
        lo: HALF_ROD,
        hi: length - HALF_ROD,
    };
    let (mut rods, effective) = run_frontier(domain, domain, Some(window), rng, &mut |x| {
        y.insert(Interval {
            lo: (x - HALF_ROD).max(0.0),
            hi: (x + HALF_ROD).min(length),
        })
    })?;
    rods.sort_by(f64::total_cmp);
    Ok(GhostState {
        geometry: Geometry::Interval,
        length,
        ghosted: y,
        accepted: rods.len() as u64,
        rods,
        candidates_seen: effective,
        acceptance_times: None,
    })
}

/// Runs the process on a circle of circumference `L > 4`.
///
/// The first candidate is always accepted. Rotating it to position 1 leaves
/// the ghosted window `(0, 2)` in place for the rest of the run, so the
/// remaining complement is the segment `[2, L]` and candidates live on the
/// length-`L` window `[1, L + 1)` with no wrap-around bookkeeping. Results are
/// rotated back so the first candidate sits at its uniformly drawn position.
pub fn run_ghost_circle(length: f64, rng: &mut RngStream) -> Result<GhostState> {
    if !(length > 4.0) {
        return Err(Error::precondition(format!(
            "circle circumference must exceed 4, got {length}"
        )));
    }
    let first = rng.uniform_in(0.0, length);
    let domain = Interval {
        lo: ROD,
        hi: length,
    };
    let support = Interval {
        lo: HALF_ROD,
        hi: length + HALF_ROD,
    };
    let mut cut_y = IntervalSet::from_intervals([Interval { lo: 0.0, hi: ROD }]);
    let (cut_rods, effective) = run_frontier(domain, support, None, rng, &mut |x| {
        cut_y.insert(Interval {
            lo: x - HALF_ROD,
            hi: (x + HALF_ROD).min(length),
        })
    })?;
    let shift = first - HALF_ROD;
    let to_orig = |p: f64| (p + shift).rem_euclid(length);
    let mut rods: Vec<f64> = std::iter::once(first)
        .chain(cut_rods.iter().map(|&p| to_orig(p)))
        .collect();
    rods.sort_by(f64::total_cmp);
    let ghosted = rotate_set(&cut_y, shift, length);
    Ok(GhostState {
        geometry: Geometry::Circle,
        length,
        ghosted,
        accepted: rods.len() as u64,
        rods,
        candidates_seen: effective + 1,
        acceptance_times: None,
    })
}

fn rotate_set(set: &IntervalSet, shift: f64, length: f64) -> IntervalSet {
    let mut out = IntervalSet::new();
    for iv in set.iter() {
        let lo = (iv.lo + shift).rem_euclid(length);
        let hi = lo + iv.len();
        if hi <= length {
            out.insert(Interval { lo, hi });
        } else {
            out.insert(Interval { lo, hi: length });
            out.insert(Interval {
                lo: 0.0,
                hi: hi - length,
            });
        }
    }
    out
}

/// The circle process run literally: uniform candidates on `[0, L)`, windows
/// taken modulo `L`. Used as an independent check on the cut construction.
pub fn run_ghost_circle_naive(length: f64, rng: &mut RngStream) -> Result<GhostState> {
    if !(length > 4.0) {
        return Err(Error::precondition(format!(
            "circle circumference must exceed 4, got {length}"
        )));
    }
    let domain = Interval { lo: 0.0, hi: length };
    let mut y = IntervalSet::new();
    let mut rods = Vec::new();
    let mut t = 0u64;
    let window = |x: f64| -> Vec<Interval> {
        let (lo, hi) = (x - HALF_ROD, x + HALF_ROD);
        if lo < 0.0 {
            vec![
                Interval { lo: 0.0, hi },
                Interval {
                    lo: lo + length,
                    hi: length,
                },
            ]
        } else if hi > length {
            vec![
                Interval { lo, hi: length },
                Interval {
                    lo: 0.0,
                    hi: hi - length,
                },
            ]
        } else {
            vec![Interval { lo, hi }]
        }
    };
    let live = |y: &IntervalSet| -> bool {
        let comps = y.complement_components(domain);
        if comps.is_empty() {
            return false;
        }
        if y.is_empty() {
            return true;
        }
        let wrap = match (comps.first(), comps.last()) {
            (Some(f), Some(l)) if comps.len() > 1 && f.lo == 0.0 && l.hi == length => {
                f.len() + l.len()
            }
            _ => 0.0,
        };
        wrap >= ROD || comps.iter().any(|c| c.len() >= ROD)
    };
    while live(&y) {
        if t >= CANDIDATE_BUDGET {
            return Err(Error::BudgetExhausted(CANDIDATE_BUDGET));
        }
        let x = rng.uniform_in(0.0, length);
        t += 1;
        let parts = window(x);
        if parts.iter().all(|p| y.contains_interval(p.lo, p.hi)) {
            continue;
        }
        if !parts.iter().any(|p| y.intersects_open(p.lo, p.hi)) {
            rods.push(x);
        }
        for p in parts {
            y.insert(p);
        }
    }
    rods.sort_by(f64::total_cmp);
    Ok(GhostState {
        geometry: Geometry::Circle,
        length,
        ghosted: y,
        accepted: rods.len() as u64,
        rods,
        candidates_seen: t,
        acceptance_times: None,
    })
}

/// Empirical frequency, over `trials` naive runs, that candidate number `t`
/// is accepted. Runs that end before time `t` contribute zero.
pub fn success_probability_empirical(
    length: f64,
    t: u64,
    trials: u64,
    master_seed: u64,
) -> Result<f64> {
    Ok(success_frequencies(length, t, trials, master_seed)?[t as usize - 1])
}

/// Acceptance frequencies for candidate times `1..=t_max`.
pub fn success_frequencies(
    length: f64,
    t_max: u64,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<f64>> {
    if t_max < 1 {
        return Err(Error::precondition("candidate time must be at least 1"));
    }
    if trials < 1 {
        return Err(Error::precondition("need at least one trial"));
    }
    let mut hits = vec![0u64; t_max as usize];
    for trial in 0..trials {
        let mut rng = RngStream::new(master_seed, trial);
        let s = run_ghost_interval(length, &mut rng, GhostMode::Naive)?;
        for &t in s.acceptance_times.as_deref().unwrap_or_default() {
            if t <= t_max {
                hits[t as usize - 1] += 1;
            }
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| h as f64 / trials as f64)
        .collect())
}
