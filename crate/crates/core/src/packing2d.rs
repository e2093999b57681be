//! Packings of axis-aligned 2×2 squares in an `L × L` box or torus.
//!
//! Squares are identified by their centres. Two squares overlap iff their
//! centres are at Chebyshev distance below 2, so the region a placed square
//! (or, in the ghost process, any candidate) forbids is the open 4×4 square
//! of centres around it. Forbidden regions are kept per grid cell as rectangle
//! unions, and free areas come from a coordinate-compression sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const SQUARE_SIDE: f64 = 2.0;
const HALF: f64 = 1.0;
/// Half-width of the forbidden square of centres.
const REACH: f64 = 2.0;
/// Relative area below which a cell counts as full.
const AREA_TOL: f64 = 1e-12;
pub const CANDIDATE_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0).max(0.0) * (self.y1 - self.y0).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0 || self.y1 <= self.y0
    }

    pub fn intersect(&self, o: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.x0.max(o.x0),
            self.y0.max(o.y0),
            self.x1.min(o.x1),
            self.y1.min(o.y1),
        );
        (!r.is_empty()).then_some(r)
    }

    /// Open-interior membership.
    pub fn contains_open(&self, x: f64, y: f64) -> bool {
        x > self.x0 && x < self.x1 && y > self.y0 && y < self.y1
    }
}

/// A vertical slab of a rectangle complement: `[x0, x1] × free`.
#[derive(Clone, Debug)]
struct Slab {
    x0: f64,
    x1: f64,
    free: Vec<(f64, f64)>,
    area: f64,
}

/// Union of axis-aligned rectangles, possibly overlapping as stored.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RectRegion {
    pub rects: Vec<Rect>,
}

impl RectRegion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: Rect) {
        if !r.is_empty() {
            self.rects.push(r);
        }
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn contains_open(&self, x: f64, y: f64) -> bool {
        self.rects.iter().any(|r| r.contains_open(x, y))
    }

    /// Area of the union.
    pub fn area(&self) -> f64 {
        let mut xs: Vec<f64> = self.rects.iter().flat_map(|r| [r.x0, r.x1]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut total = 0.0;
        let mut ys = Vec::new();
        for w in xs.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            ys.clear();
            ys.extend(
                self.rects
                    .iter()
                    .filter(|r| r.x0 <= mid && r.x1 >= mid)
                    .map(|r| (r.y0, r.y1)),
            );
            total += (w[1] - w[0]) * merged_length(&mut ys);
        }
        total
    }

    /// Area of the union restricted to `bounds`.
    pub fn area_within(&self, bounds: &Rect) -> f64 {
        let clipped = RectRegion {
            rects: self.rects.iter().filter_map(|r| r.intersect(bounds)).collect(),
        };
        clipped.area()
    }

    /// Whether the union covers `r` up to measure zero.
    pub fn covers(&self, r: &Rect) -> bool {
        r.area() - self.area_within(r) <= AREA_TOL * r.area().max(1.0)
    }

    fn complement_slabs(&self, bounds: &Rect) -> Vec<Slab> {
        let clipped: Vec<Rect> = self.rects.iter().filter_map(|r| r.intersect(bounds)).collect();
        let mut xs: Vec<f64> = clipped.iter().flat_map(|r| [r.x0, r.x1]).collect();
        xs.push(bounds.x0);
        xs.push(bounds.x1);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut out = Vec::new();
        for w in xs.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut ys: Vec<(f64, f64)> = clipped
                .iter()
                .filter(|r| r.x0 <= mid && r.x1 >= mid)
                .map(|r| (r.y0, r.y1))
                .collect();
            ys.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut free = Vec::new();
            let mut cursor = bounds.y0;
            for (lo, hi) in ys {
                if lo > cursor {
                    free.push((cursor, lo));
                }
                cursor = cursor.max(hi);
            }
            if bounds.y1 > cursor {
                free.push((cursor, bounds.y1));
            }
            let len: f64 = free.iter().map(|(a, b)| b - a).sum();
            let area = len * (w[1] - w[0]);
            if area > 0.0 {
                out.push(Slab {
                    x0: w[0],
                    x1: w[1],
                    free,
                    area,
                });
            }
        }
        out
    }

    /// Area of `bounds` not covered by the union.
    pub fn complement_area(&self, bounds: &Rect) -> f64 {
        self.complement_slabs(bounds).iter().map(|s| s.area).sum()
    }

    /// Uniform point of `bounds` outside the union, or `None` if it is full.
    pub fn sample_complement(&self, bounds: &Rect, rng: &mut RngStream) -> Option<(f64, f64)> {
        let slabs = self.complement_slabs(bounds);
        let total: f64 = slabs.iter().map(|s| s.area).sum();
        if total <= 0.0 {
            return None;
        }
        let mut u = rng.uniform_in(0.0, total);
        let slab = slabs
            .iter()
            .find(|s| {
                if u < s.area {
                    true
                } else {
                    u -= s.area;
                    false
                }
            })
            .unwrap_or_else(|| slabs.last().expect("non-empty"));
        let x = rng.uniform_in(slab.x0, slab.x1);
        let len: f64 = slab.free.iter().map(|(a, b)| b - a).sum();
        let mut v = rng.uniform_in(0.0, len);
        for &(a, b) in &slab.free {
            if v < b - a {
                return Some((x, a + v));
            }
            v -= b - a;
        }
        let &(a, b) = slab.free.last().expect("non-empty");
        Some((x, 0.5 * (a + b)))
    }
}

fn merged_length(ys: &mut [(f64, f64)]) -> f64 {
    ys.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for &(lo, hi) in ys.iter() {
        match cur {
            Some((a, b)) if lo <= b => cur = Some((a, b.max(hi))),
            Some((a, b)) => {
                total += b - a;
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    total
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry2D {
    #[default]
    Boxed,
    Torus,
}

#[derive(Clone, Debug, Serialize)]
pub struct Packing2DState {
    pub length: f64,
    pub geometry: Geometry2D,
    pub centers: Vec<(f64, f64)>,
    #[serde(skip)]
    pub ghost_forbidden: Option<RectRegion>,
    pub candidates_seen: u64,
    pub accepted: u64,
    /// Squares placed by the ghost phase of `ghost_then_classical`.
    pub ghost_count: Option<usize>,
}

impl Packing2DState {
    pub fn count(&self) -> usize {
        self.centers.len()
    }

    /// Covered fraction `4n / L²`.
    pub fn density(&self) -> f64 {
        SQUARE_SIDE * SQUARE_SIDE * self.centers.len() as f64 / (self.length * self.length)
    }

    fn delta(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self.geometry {
            Geometry2D::Boxed => d,
            Geometry2D::Torus => d.min(self.length - d),
        }
    }

    /// Chebyshev distance between centres (wrapped on the torus).
    pub fn distance(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        self.delta(a.0, b.0).max(self.delta(a.1, b.1))
    }

    /// Pairwise non-overlap and containment, checked exhaustively.
    pub fn is_valid(&self) -> bool {
        let l = self.length;
        let inside = self.centers.iter().all(|&(x, y)| match self.geometry {
            Geometry2D::Boxed => {
                (HALF..=l - HALF).contains(&x) && (HALF..=l - HALF).contains(&y)
            }
            Geometry2D::Torus => (0.0..l).contains(&x) && (0.0..l).contains(&y),
        });
        let n = self.centers.len();
        let apart = (0..n).all(|i| {
            (i + 1..n).all(|j| self.distance(self.centers[i], self.centers[j]) >= SQUARE_SIDE)
        });
        inside && apart && self.accepted as usize == n
    }
}

/// Domain of centres split into square cells of side at least 2, each holding
/// the part of the forbidden region that meets it.
struct CellGrid {
    geometry: Geometry2D,
    length: f64,
    origin: f64,
    side: f64,
    n: usize,
    rects: Vec<Vec<Rect>>,
    free: Vec<f64>,
    cell_area: f64,
}

impl CellGrid {
    fn new(length: f64, geometry: Geometry2D) -> Self {
        let (origin, width) = match geometry {
            Geometry2D::Boxed => (HALF, length - 2.0 * HALF),
            Geometry2D::Torus => (0.0, length),
        };
        let n = ((width / REACH).floor() as usize).max(1);
        let side = width / n as f64;
        let cell_area = side * side;
        Self {
            geometry,
            length,
            origin,
            side,
            n,
            rects: vec![Vec::new(); n * n],
            free: vec![cell_area; n * n],
            cell_area,
        }
    }

    fn bounds(&self, k: usize) -> Rect {
        let (i, j) = (k % self.n, k / self.n);
        let x0 = self.origin + i as f64 * self.side;
        let y0 = self.origin + j as f64 * self.side;
        let (x1, y1) = if i + 1 == self.n {
            (self.origin + self.n as f64 * self.side, y0 + self.side)
        } else {
            (x0 + self.side, y0 + self.side)
        };
        let y1 = if j + 1 == self.n {
            self.origin + self.n as f64 * self.side
        } else {
            y1
        };
        Rect::new(x0, y0, x1, y1)
    }

    fn domain(&self) -> Rect {
        let hi = self.origin + self.n as f64 * self.side;
        Rect::new(self.origin, self.origin, hi, hi)
    }

    fn index_of(&self, v: f64) -> usize {
        (((v - self.origin) / self.side).floor().max(0.0) as usize).min(self.n - 1)
    }

    fn cell_of(&self, x: f64, y: f64) -> usize {
        self.index_of(y) * self.n + self.index_of(x)
    }

    fn is_full(&self, k: usize) -> bool {
        self.free[k] <= AREA_TOL * self.cell_area
    }

    fn free_total(&self) -> f64 {
        (0..self.free.len())
            .filter(|&k| !self.is_full(k))
            .map(|k| self.free[k])
            .sum()
    }

    /// Pieces of the open square of half-width `REACH` around `c` inside the
    /// domain (several pieces on the torus when it crosses a seam).
    fn exclusion_pieces(&self, c: (f64, f64)) -> Vec<Rect> {
        let base = Rect::new(c.0 - REACH, c.1 - REACH, c.0 + REACH, c.1 + REACH);
        let domain = self.domain();
        let shifts: &[f64] = match self.geometry {
            Geometry2D::Boxed => &[0.0],
            Geometry2D::Torus => &[-self.length, 0.0, self.length],
        };
        let mut out = Vec::new();
        for &dx in shifts {
            for &dy in shifts {
                let r = Rect::new(base.x0 + dx, base.y0 + dy, base.x1 + dx, base.y1 + dy);
                if let Some(p) = r.intersect(&domain) {
                    out.push(p);
                }
            }
        }
        out
    }

    fn is_forbidden(&self, x: f64, y: f64) -> bool {
        self.rects[self.cell_of(x, y)].iter().any(|r| r.contains_open(x, y))
    }

    /// Adds the exclusion square around `c`; returns whether the forbidden
    /// region grew.
    fn insert(&mut self, c: (f64, f64)) -> bool {
        let mut grew = false;
        for piece in self.exclusion_pieces(c) {
            let (i0, i1) = (self.index_of(piece.x0), self.index_of(piece.x1));
            let (j0, j1) = (self.index_of(piece.y0), self.index_of(piece.y1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let k = j * self.n + i;
                    if self.is_full(k) {
                        continue;
                    }
                    let Some(part) = piece.intersect(&self.bounds(k)) else {
                        continue;
                    };
                    let region = RectRegion {
                        rects: std::mem::take(&mut self.rects[k]),
                    };
                    let covered = region.covers(&part);
                    let mut rects = region.rects;
                    if !covered {
                        rects.push(part);
                        let region = RectRegion { rects };
                        self.free[k] = region.complement_area(&self.bounds(k));
                        rects = region.rects;
                        grew = true;
                    }
                    self.rects[k] = rects;
                }
            }
        }
        grew
    }

    fn sample_free(&self, rng: &mut RngStream) -> Option<(f64, f64)> {
        let total = self.free_total();
        if total <= 0.0 {
            return None;
        }
        let mut u = rng.uniform_in(0.0, total);
        let mut pick = None;
        for k in (0..self.free.len()).filter(|&k| !self.is_full(k)) {
            pick = Some(k);
            if u < self.free[k] {
                break;
            }
            u -= self.free[k];
        }
        let k = pick?;
        let region = RectRegion {
            rects: self.rects[k].clone(),
        };
        region.sample_complement(&self.bounds(k), rng)
    }

    /// Cells within one cell of a non-full cell; every candidate that can
    /// change the forbidden region lies in one of them.
    fn active_cells(&self) -> Vec<usize> {
        let n = self.n as isize;
        let mut mark = vec![false; self.free.len()];
        for k in (0..self.free.len()).filter(|&k| !self.is_full(k)) {
            let (i, j) = ((k % self.n) as isize, (k / self.n) as isize);
            for dj in -1..=1 {
                for di in -1..=1 {
                    let (mut a, mut b) = (i + di, j + dj);
                    match self.geometry {
                        Geometry2D::Boxed => {
                            if a < 0 || b < 0 || a >= n || b >= n {
                                continue;
                            }
                        }
                        Geometry2D::Torus => {
                            a = a.rem_euclid(n);
                            b = b.rem_euclid(n);
                        }
                    }
                    mark[(b * n + a) as usize] = true;
                }
            }
        }
        (0..mark.len()).filter(|&k| mark[k]).collect()
    }

    fn all_rects(&self) -> RectRegion {
        RectRegion {
            rects: self.rects.iter().flatten().copied().collect(),
        }
    }
}

fn check_length(length: f64) -> Result<()> {
    if !(length.is_finite() && length >= SQUARE_SIDE) {
        return Err(Error::precondition(format!("L must be at least 2, got {length}")));
    }
    Ok(())
}

fn empty_state(length: f64, geometry: Geometry2D) -> Packing2DState {
    Packing2DState {
        length,
        geometry,
        centers: Vec::new(),
        ghost_forbidden: None,
        candidates_seen: 0,
        accepted: 0,
        ghost_count: None,
    }
}

/// The boxed domain of centres collapses to the single point `(1, 1)` at `L = 2`.
fn degenerate_box(length: f64) -> bool {
    length - SQUARE_SIDE <= AREA_TOL * length
}

fn classical_fill(state: &mut Packing2DState, rng: &mut RngStream) -> Result<()> {
    let mut grid = CellGrid::new(state.length, state.geometry);
    for &c in &state.centers {
        grid.insert(c);
    }
    // Candidates landing in the forbidden region are rejected without side
    // effects, so drawing directly from the free region gives the same law.
    while let Some(c) = grid.sample_free(rng) {
        if state.candidates_seen >= CANDIDATE_BUDGET {
            return Err(Error::BudgetExhausted(CANDIDATE_BUDGET));
        }
        state.candidates_seen += 1;
        state.centers.push(c);
        state.accepted += 1;
        grid.insert(c);
    }
    Ok(())
}

/// Classical random sequential addition in the `L × L` box until saturation.
pub fn saturate_classical_2d(length: f64, rng: &mut RngStream) -> Result<Packing2DState> {
    saturate_classical_2d_in(length, Geometry2D::Boxed, rng)
}

pub fn saturate_classical_2d_in(length: f64, geometry: Geometry2D, rng: &mut RngStream) -> Result<Packing2DState> {
    check_length(length)?;
    let mut state = empty_state(length, geometry);
    if geometry == Geometry2D::Boxed && degenerate_box(length) {
        state.centers.push((HALF, HALF));
        state.accepted = 1;
        state.candidates_seen = 1;
        return Ok(state);
    }
    classical_fill(&mut state, rng)?;
    Ok(state)
}

/// Ghost process: every candidate forbids its 4×4 square of centres for all
/// later candidates; a candidate is placed iff no earlier candidate forbade
/// it. Candidates are uniform on the domain of centres. Runs until the set of
/// acceptable centres has zero area.
pub fn run_ghost_2d(length: f64, rng: &mut RngStream, geometry: Geometry2D) -> Result<Packing2DState> {
    check_length(length)?;
    let mut state = empty_state(length, geometry);
    if geometry == Geometry2D::Boxed && degenerate_box(length) {
        state.centers.push((HALF, HALF));
        state.accepted = 1;
        state.candidates_seen = 1;
        state.ghost_forbidden = Some(RectRegion::new());
        return Ok(state);
    }
    let mut grid = CellGrid::new(length, geometry);
    loop {
        let active = grid.active_cells();
        if grid.free_total() <= 0.0 || active.is_empty() {
            break;
        }
        if state.candidates_seen >= CANDIDATE_BUDGET {
            return Err(Error::BudgetExhausted(CANDIDATE_BUDGET));
        }
        // Candidates outside the active cells cannot change anything; the
        // uniform law restricted to the active cells is uniform on their union
        // because all cells have equal area.
        for _ in 0..active.len() {
            let k = active[(rng.uniform() * active.len() as f64) as usize % active.len()];
            let b = grid.bounds(k);
            let c = (rng.uniform_in(b.x0, b.x1), rng.uniform_in(b.y0, b.y1));
            state.candidates_seen += 1;
            if !grid.is_forbidden(c.0, c.1) {
                state.centers.push(c);
                state.accepted += 1;
            }
            if grid.insert(c) {
                break;
            }
        }
    }
    state.ghost_forbidden = Some(grid.all_rects());
    Ok(state)
}

/// Ghost process in the box, then classical saturation from the ghost
/// squares with the ghost region discarded.
pub fn ghost_then_classical(length: f64, rng: &mut RngStream) -> Result<Packing2DState> {
    let mut state = run_ghost_2d(length, rng, Geometry2D::Boxed)?;
    let ghosts = state.count();
    state.ghost_forbidden = None;
    if !degenerate_box(length) {
        classical_fill(&mut state, rng)?;
    }
    state.ghost_count = Some(ghosts);
    Ok(state)
}

/// Side of the largest empty axis-aligned square that fits among the placed
/// squares, from a Chebyshev distance field sampled every `resolution`.
/// The result is within `2 * resolution` below the true optimum.
pub fn largest_empty_square(state: &Packing2DState, resolution: f64) -> Result<f64> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::precondition(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let l = state.length;
    let steps = (l / resolution).ceil() as usize;
    let mut best: f64 = 0.0;
    for j in 0..=steps {
        let y = (j as f64 * resolution).min(l);
        for i in 0..=steps {
            let x = (i as f64 * resolution).min(l);
            let mut half = match state.geometry {
                Geometry2D::Boxed => x.min(l - x).min(y).min(l - y),
                Geometry2D::Torus => 0.5 * l,
            };
            for &c in &state.centers {
                half = half.min((state.distance((x, y), c) - HALF).max(0.0));
                if half <= best {
                    break;
                }
            }
            best = best.max(half);
        }
    }
    Ok(2.0 * best)
}
