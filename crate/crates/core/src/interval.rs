//! One-dimensional interval arithmetic shared by the simulators.
//!
//! Endpoints are not tagged open or closed: two parts that touch
//! (`a.hi == b.lo`) are merged, so every set has a single canonical form and
//! all measure computations are unambiguous.

use std::collections::BTreeMap;

use ordered_float::OrderedFloat;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Absolute tolerance for measure comparisons, scaled by the domain length.
pub const MEASURE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::precondition(format!(
                "interval endpoints must be finite, got ({lo}, {hi})"
            )));
        }
        if lo > hi {
            return Err(Error::precondition(format!(
                "interval lo {lo} exceeds hi {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.hi <= self.lo
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Intersection, or `None` when it has no interior.
    pub fn clip(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }
}

/// Canonical disjoint union of intervals, keyed by left endpoint.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntervalSet {
    parts: BTreeMap<OrderedFloat<f64>, f64>,
}

impl IntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the canonical union of arbitrary (possibly overlapping) intervals.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(it: I) -> Self {
        let mut set = Self::new();
        for iv in it {
            set.insert(iv);
        }
        set
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of maximal parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = Interval> + '_ {
        self.parts
            .iter()
            .map(|(lo, hi)| Interval { lo: lo.0, hi: *hi })
    }

    pub fn to_vec(&self) -> Vec<Interval> {
        self.iter().collect()
    }

    pub fn measure(&self) -> f64 {
        self.iter().map(|iv| iv.len()).sum()
    }

    /// Unions one interval into the set, merging every part it overlaps or touches.
    /// Degenerate intervals are ignored.
    pub fn insert(&mut self, iv: Interval) {
        if iv.is_degenerate() {
            return;
        }
        let mut lo = iv.lo;
        let mut hi = iv.hi;
        let mut doomed = Vec::new();
        for (&k, &v) in self.parts.range(..=OrderedFloat(iv.hi)).rev() {
            if v < iv.lo {
                break;
            }
            lo = lo.min(k.0);
            hi = hi.max(v);
            doomed.push(k);
        }
        for k in doomed {
            self.parts.remove(&k);
        }
        self.parts.insert(OrderedFloat(lo), hi);
    }

    /// Unions `(center - radius, center + radius) ∩ domain` into the set.
    pub fn insert_dilated(&mut self, center: f64, radius: f64, domain: Interval) -> Result<()> {
        if !domain.contains(center) {
            return Err(Error::precondition(format!(
                "center {center} lies outside [{}, {}]",
                domain.lo, domain.hi
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::precondition(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let lo = (center - radius).max(domain.lo);
        let hi = (center + radius).min(domain.hi);
        self.insert(Interval { lo, hi });
        Ok(())
    }

    /// True if `x` lies in the interior of some part.
    pub fn covers_point(&self, x: f64) -> bool {
        self.parts
            .range(..OrderedFloat(x))
            .next_back()
            .is_some_and(|(_, &hi)| x < hi)
    }

    /// True if the open interval `(lo, hi)` shares positive measure with the set.
    pub fn intersects_open(&self, lo: f64, hi: f64) -> bool {
        if lo >= hi {
            return false;
        }
        self.parts
            .range(..OrderedFloat(hi))
            .next_back()
            .is_some_and(|(_, &phi)| phi > lo)
    }

    /// True if `(lo, hi)` is contained in a single part.
    pub fn contains_interval(&self, lo: f64, hi: f64) -> bool {
        self.parts
            .range(..=OrderedFloat(lo))
            .next_back()
            .is_some_and(|(_, &phi)| phi >= hi)
    }

    /// Maximal intervals of `domain` not covered by the set, in increasing
    /// order. Components of zero length are dropped.
    pub fn complement_components(&self, domain: Interval) -> Vec<Interval> {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut cursor = domain.lo;
        for iv in self.iter() {
            if iv.hi <= domain.lo {
                continue;
            }
            if iv.lo >= domain.hi {
                break;
            }
            if iv.lo > cursor {
                out.push(Interval {
                    lo: cursor,
                    hi: iv.lo,
                });
            }
            cursor = cursor.max(iv.hi);
        }
        if cursor < domain.hi {
            out.push(Interval {
                lo: cursor,
                hi: domain.hi,
            });
        }
        out
    }

    /// `{x ∈ domain : dist(x, set) < radius}` in canonical form.
    pub fn dilate(&self, radius: f64, domain: Interval) -> IntervalSet {
        if radius <= 0.0 {
            return IntervalSet::from_intervals(self.iter().filter_map(|iv| iv.clip(&domain)));
        }
        IntervalSet::from_intervals(self.iter().filter_map(|iv| {
            Interval {
                lo: iv.lo - radius,
                hi: iv.hi + radius,
            }
            .clip(&domain)
        }))
    }
}

/// Draws a point uniformly from the union of `components` by inverse transform.
pub fn sample_uniform(components: &[Interval], rng: &mut RngStream) -> Result<f64> {
    let total: f64 = components.iter().map(|c| c.len().max(0.0)).sum();
    if !(total > 0.0) {
        return Err(Error::EmptySupport);
    }
    let mut target = rng.uniform() * total;
    let mut last = None;
    for c in components {
        let w = c.len();
        if w <= 0.0 {
            continue;
        }
        if target < w {
            return Ok(c.lo + target);
        }
        target -= w;
        last = Some(c);
    }
    // only reachable through rounding in the running subtraction
    let c = last.ok_or(Error::EmptySupport)?;
    Ok(rng.uniform_in(c.lo, c.hi))
}
