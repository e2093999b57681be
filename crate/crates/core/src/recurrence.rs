//! Integral recurrences for the classical process and the ghost retention
//! probability, marched on uniform grids aligned with every kink.
//!
//! All delay equations here have a delay of 2 and a base region of width 2,
//! so on each grid the base contribution is integrated exactly and only the
//! marched part uses the composite trapezoid rule. Every table is solved at
//! `h` and `h/2`; the reported error is the Richardson estimate
//! `(4/3)|T_h - T_{h/2}|`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default argument at which limits are read off.
pub const DEFAULT_L_BIG: f64 = 200.0;
pub const DEFAULT_STEP: f64 = 0.01;

const ALIGN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceTable {
    pub name: String,
    pub grid_step: f64,
    /// Argument of `values[0]`.
    pub min_arg: f64,
    pub max_arg: f64,
    pub values: Vec<f64>,
    /// Richardson estimate at each grid point.
    pub errors: Vec<f64>,
    pub breakpoints: Vec<f64>,
    pub est_error: f64,
}

impl RecurrenceTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn arg(&self, i: usize) -> f64 {
        self.min_arg + i as f64 * self.grid_step
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.arg(i), v))
    }

    /// Value at `x`: the grid value when `x` is a grid point, otherwise linear
    /// interpolation. `None` outside the table.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let t = (x - self.min_arg) / self.grid_step;
        let last = (self.values.len() - 1) as f64;
        if !(t > -ALIGN_TOL && t < last + ALIGN_TOL) {
            return None;
        }
        let k = t.round();
        if (t - k).abs() < ALIGN_TOL {
            return Some(self.values[k as usize]);
        }
        let i = t.floor() as usize;
        let w = t - i as f64;
        Some((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    pub fn error_at(&self, x: f64) -> Option<f64> {
        let k = ((x - self.min_arg) / self.grid_step).round();
        if k < 0.0 || k as usize >= self.errors.len() {
            return None;
        }
        Some(self.errors[k as usize])
    }

    /// CSV with header `arg,value,est_error`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["arg", "value", "est_error"])?;
        for (i, (x, v)) in self.iter().enumerate() {
            w.write_record([x.to_string(), v.to_string(), self.errors[i].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub at_arg: f64,
    /// `|g(at_arg) - g(at_arg / 2)|`.
    pub residual: f64,
    /// Discretisation error of the table entry the value was read from.
    pub discretization_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitParams {
    pub l_big: f64,
    pub step: f64,
}

impl Default for LimitParams {
    fn default() -> Self {
        Self {
            l_big: DEFAULT_L_BIG,
            step: DEFAULT_STEP,
        }
    }
}

fn grid_index(x: f64, h: f64) -> Result<usize> {
    let t = x / h;
    let k = t.round();
    if (t - k).abs() > ALIGN_TOL * t.abs().max(1.0) {
        return Err(Error::GridMisaligned {
            breakpoint: x,
            step: h,
        });
    }
    Ok(k as usize)
}

fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0 && h <= 1.0) {
        return Err(Error::precondition(format!("grid step must lie in (0, 1], got {h}")));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::precondition(format!("r must lie in (0, 2), got {r}")));
    }
    Ok(())
}

/// Solves on `h` and `h/2` and assembles the table from the coarse grid.
fn with_richardson<F>(name: &str, min_arg: f64, max_arg: f64, h: f64, breakpoints: Vec<f64>, solve: F) -> Result<RecurrenceTable>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    for &b in &breakpoints {
        grid_index(b - min_arg, h)?;
    }
    grid_index(max_arg - min_arg, h)?;
    let coarse = solve(h)?;
    let fine = solve(h / 2.0)?;
    let errors: Vec<f64> = coarse
        .iter()
        .enumerate()
        .map(|(i, v)| 4.0 / 3.0 * (v - fine[2 * i]).abs())
        .collect();
    let est_error = errors.iter().copied().fold(0.0, f64::max);
    Ok(RecurrenceTable {
        name: name.to_string(),
        grid_step: h,
        min_arg,
        max_arg,
        values: coarse,
        errors,
        breakpoints,
        est_error,
    })
}

/// `F(L) = c + k/(L-2) * ∫_0^{L-2} F` for `L > 2`, with `F = base` on `[0, 2)`.
/// `base_int(y)` must return `∫_0^y base` for `y ∈ [0, 2]`.
fn march_delay<B, I>(base: B, base_int: I, c: f64, k: f64, l_max: f64, h: f64) -> Result<Vec<f64>>
where
    B: Fn(f64) -> f64,
    I: Fn(f64) -> f64,
{
    let n = grid_index(l_max, h)?;
    let m = grid_index(2.0, h)?;
    let mut v = vec![0.0; n + 1];
    for (i, slot) in v.iter_mut().enumerate().take(m.min(n + 1)) {
        *slot = base(i as f64 * h);
    }
    if n < m {
        return Ok(v);
    }
    // At L = 2 the integral vanishes with the prefactor blowing up; the
    // product tends to the base value at 0.
    v[m] = c + k * base(0.0);
    // cum[j] = ∫_2^{x_j} F, for j >= m
    let mut cum = vec![0.0; n + 1];
    for i in m + 1..=n {
        let j = i - m;
        let y = j as f64 * h;
        let mut integral = base_int(y.min(2.0));
        if j > m {
            integral += cum[j];
        }
        v[i] = c + k * integral / y;
        cum[i] = cum[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
    }
    Ok(v)
}

/// Expected rod count `E[N(L)]` of the saturated classical packing.
pub fn solve_density(l_max: f64, h: f64) -> Result<RecurrenceTable> {
    if !(h > 0.0 && h <= 0.05) {
        return Err(Error::precondition(format!("grid step must lie in (0, 0.05], got {h}")));
    }
    if !(l_max >= 4.0) {
        return Err(Error::precondition(format!("L_max must be at least 4, got {l_max}")));
    }
    with_richardson("rod_count", 0.0, l_max, h, vec![2.0, 4.0], |step| {
        march_delay(|_| 0.0, |_| 0.0, 1.0, 2.0, l_max, step)
    })
}

fn gap_base(r: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    (
        move |x: f64| if x >= r && x < 2.0 { 1.0 } else { 0.0 },
        move |y: f64| (y.min(2.0) - r).max(0.0),
    )
}

fn gap_breakpoints(r: f64) -> Vec<f64> {
    vec![r, 2.0, 2.0 + r, 4.0]
}

/// `f_r(L) = E[G(L, r)]`, the expected number of gaps of length at least `r`.
pub fn solve_gap_expectation(r: f64, l_max: f64, h: f64) -> Result<RecurrenceTable> {
    check_r(r)?;
    check_step(h)?;
    if !(l_max >= 4.0) {
        return Err(Error::precondition(format!("L_max must be at least 4, got {l_max}")));
    }
    with_richardson("gap_count", 0.0, l_max, h, gap_breakpoints(r), |step| {
        let (base, base_int) = gap_base(r);
        march_delay(base, base_int, 0.0, 2.0, l_max, step)
    })
}

/// The equality form of the second-moment recurrence,
/// `S(L) = 4/(L-2) ∫_0^{L-2} S` with the gap base case.
pub fn solve_second_moment_bound(r: f64, l_max: f64, h: f64) -> Result<RecurrenceTable> {
    check_r(r)?;
    check_step(h)?;
    if !(l_max >= 4.0) {
        return Err(Error::precondition(format!("L_max must be at least 4, got {l_max}")));
    }
    with_richardson("gap_count_second_moment", 0.0, l_max, h, gap_breakpoints(r), |step| {
        let (base, base_int) = gap_base(r);
        march_delay(base, base_int, 0.0, 4.0, l_max, step)
    })
}

/// `g_r(L) = f_r(L) / (L + 2)` read at `l_big`.
pub fn limit_coefficient_c(r: f64, params: LimitParams) -> Result<LimitEstimate> {
    let table = solve_gap_expectation(r, params.l_big, params.step)?;
    Ok(read_limit(&table, params.l_big))
}

fn read_limit(table: &RecurrenceTable, l_big: f64) -> LimitEstimate {
    let g = |x: f64| table.value_at(x).expect("inside table") / (x + 2.0);
    let value = g(l_big);
    LimitEstimate {
        value,
        at_arg: l_big,
        residual: (value - g(l_big / 2.0)).abs(),
        discretization_error: table.error_at(l_big).unwrap_or(0.0) / (l_big + 2.0),
    }
}

fn march_h(r: f64, l_max: f64, h: f64) -> Result<Vec<f64>> {
    // index i ↔ L = 2 + i h
    let n = grid_index(l_max - 2.0, h)?;
    let m = grid_index(2.0, h)?;
    let kr = grid_index(r, h)?;
    let analytic = |y: f64| {
        // ∫_2^y h_r for y ∈ [2, 4]
        if y - 2.0 < r {
            0.0
        } else {
            2.0 * ((y - 2.0) / r).ln()
        }
    };
    let mut v = vec![0.0; n + 1];
    let mut cum = vec![0.0; n + 1];
    for i in 1..=n {
        let l = 2.0 + i as f64 * h;
        v[i] = if i < kr {
            0.0
        } else if i <= m {
            2.0 / (l - 2.0)
        } else {
            // L - 2 = 2 + (i - m) h, i.e. table index i - m
            let j = i - m;
            let mut a = analytic((2.0 + j as f64 * h).min(4.0));
            if j > m {
                a += cum[j];
            }
            2.0 / (l - 2.0) * (1.0 + a)
        };
        if i > m {
            cum[i] = cum[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
        }
    }
    Ok(v)
}

/// `h_r(L)` on `[2, l_big]` and `λ_r = lim h_r(L) / (L + 2)`.
pub fn solve_h_and_lambda(r: f64, params: LimitParams) -> Result<(RecurrenceTable, LimitEstimate)> {
    if !(r > 0.0 && r <= 2.0) {
        return Err(Error::precondition(format!("r must lie in (0, 2], got {r}")));
    }
    check_step(params.step)?;
    if !(params.l_big >= 8.0) {
        return Err(Error::precondition("L_big must be at least 8"));
    }
    let breaks = vec![2.0 + r, 4.0, 4.0 + r];
    let table = with_richardson("h", 2.0, params.l_big, params.step, breaks, |step| {
        march_h(r, params.l_big, step)
    })?;
    let lambda = read_limit(&table, params.l_big);
    Ok((table, lambda))
}

fn march_retention(s_max: f64, h: f64) -> Result<Vec<f64>> {
    let n = grid_index(s_max, h)?;
    let m = grid_index(2.0, h)?;
    let mut p = vec![1.0; n + 1];
    let mut cum = vec![0.0; n + 1];
    for i in 1..=n {
        if i > m {
            let s = i as f64 * h;
            let rhs = cum[i - 1] - cum[i - m] + 0.5 * h * p[i - 1];
            p[i] = rhs / (0.5 * (s + 2.0) - 0.5 * h);
        }
        cum[i] = cum[i - 1] + 0.5 * h * (p[i - 1] + p[i]);
    }
    Ok(p)
}

/// Retention probability `P(s) = 2/(s+2) ∫_{s-2}^s P` with `P = 1` on `[0, 2]`,
/// marched with the implicit trapezoid rule.
pub fn solve_retention(s_max: f64, h: f64) -> Result<RecurrenceTable> {
    if !(h > 0.0 && h <= 0.01) {
        return Err(Error::precondition(format!("grid step must lie in (0, 0.01], got {h}")));
    }
    if !(s_max >= 4.0) {
        return Err(Error::precondition(format!("s_max must be at least 4, got {s_max}")));
    }
    with_richardson("retention", 0.0, s_max, h, vec![2.0, 4.0], |step| {
        march_retention(s_max, step)
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RetentionBounds {
    /// `s^{-s} <= P(s)` at every grid point of the check window.
    pub lower_holds: bool,
    pub c_hat: f64,
    /// Largest `P(s) s^{s/3} / c_hat` on the validation window.
    pub worst_upper_ratio: f64,
    pub upper_holds: bool,
    /// First grid point where the upper bound fails, if any.
    pub first_upper_violation: Option<f64>,
}

/// Lower bound check on `[2, check_hi]`; `Ĉ = max P(s) s^{s/3}` over the fit
/// window, validated on `(fit_hi, check_hi]`.
pub fn retention_bounds(table: &RecurrenceTable, fit: (f64, f64), check_hi: f64) -> RetentionBounds {
    let scaled = |s: f64, p: f64| p * s.powf(s / 3.0);
    let mut lower_holds = true;
    let mut c_hat: f64 = 0.0;
    for (s, p) in table.iter() {
        if s >= 2.0 - ALIGN_TOL && s <= check_hi + ALIGN_TOL && p < s.powf(-s) {
            lower_holds = false;
        }
        if s >= fit.0 - ALIGN_TOL && s <= fit.1 + ALIGN_TOL {
            c_hat = c_hat.max(scaled(s, p));
        }
    }
    let mut worst: f64 = 0.0;
    let mut first = None;
    for (s, p) in table.iter() {
        if s > fit.1 + ALIGN_TOL && s <= check_hi + ALIGN_TOL {
            let ratio = scaled(s, p) / c_hat;
            worst = worst.max(ratio);
            if ratio > 1.0 && first.is_none() {
                first = Some(s);
            }
        }
    }
    RetentionBounds {
        lower_holds,
        c_hat,
        worst_upper_ratio: worst,
        upper_holds: first.is_none(),
        first_upper_violation: first,
    }
}

/// `Ein(x) = ∫_0^x (1 - e^{-y}) / y dy`.
pub fn ein(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 2.0 {
        let mut term = x;
        let mut sum = x;
        for k in 2..60 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        EULER_GAMMA + x.ln() + e1(x)
    }
}

/// Exponential integral `E1(x)` for `x >= 1`, by Lentz's continued fraction.
fn e1(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut f = d;
    for i in 1..500 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f * (-x).exp()
}

/// Rényi's parking constant `α = ∫_0^∞ exp(-2 Ein(x)) dx`.
pub fn renyi_alpha(tolerance: f64) -> Result<LimitEstimate> {
    if !(tolerance > 0.0 && tolerance <= 1e-3) {
        return Err(Error::precondition(format!(
            "tolerance must lie in (0, 1e-3], got {tolerance}"
        )));
    }
    // Beyond X the integrand is e^{-2γ}/x² up to a factor exp(-2 E1(x)).
    let cut: f64 = 60.0;
    let outer = |x: f64| (-2.0 * ein(x)).exp();
    let body = quadrature::integrate(outer, 0.0, cut, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0], 0.5);
    let tail = (-2.0 * EULER_GAMMA).exp() / cut;
    let coarse = quadrature::integrate(outer, 0.0, cut, &[2.0, 8.0, 32.0], 4.0);
    Ok(LimitEstimate {
        value: body + tail,
        at_arg: cut,
        residual: (body - coarse).abs(),
        discretization_error: 2.0 * e1(cut) * tail,
    })
}
