//! Closed-form quantities of the 1D ghost process: per-step acceptance
//! probability, expected rod count, occupancy near a wall and the pair
//! correlation on a circle.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::ghost::Geometry;
use crate::quadrature;

/// Smallest `L` for which the acceptance probability formula holds (the two
/// boundary windows must not interact).
pub const SUCCESS_PROB_FLOOR: f64 = 6.0;
pub const OCCUPANCY_FLOOR: f64 = 10.0;
pub const PAIR_CORRELATION_FLOOR: f64 = 20.0;

fn ln(x: f64) -> f64 {
    x.ln()
}

/// A function given piece by piece on consecutive intervals.
///
/// Piece `i` applies on `[breakpoints[i-1], breakpoints[i])` (the first piece
/// starts at `domain_lo`, the last one is unbounded).
pub struct PiecewiseFormula {
    pub name: &'static str,
    pub domain_lo: f64,
    pub breakpoints: Vec<f64>,
    pieces: Vec<fn(f64) -> f64>,
    pub validity_floor: f64,
}

impl PiecewiseFormula {
    fn piece_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)](x)
    }

    /// Value of piece `i` at `x`, regardless of where `x` falls.
    pub fn eval_piece(&self, i: usize, x: f64) -> f64 {
        self.pieces[i](x)
    }

    /// Largest jump between adjacent pieces over all interior breakpoints.
    pub fn max_jump(&self) -> f64 {
        self.breakpoints
            .iter()
            .enumerate()
            .map(|(i, &b)| (self.pieces[i](b) - self.pieces[i + 1](b)).abs())
            .fold(0.0, f64::max)
    }
}

/// Occupancy at distance `x` from the nearer wall (valid for `L ≥ 10`).
pub fn occupancy_formula() -> PiecewiseFormula {
    PiecewiseFormula {
        name: "occupancy",
        domain_lo: 0.0,
        breakpoints: vec![1.0, 2.0, 3.0],
        pieces: vec![
            |x| ln((3.0 + x) / 3.0),
            |x| (x - 1.0) / 4.0 + ln(4.0 / 3.0),
            |x| (x - 1.0) / 4.0 + ln(4.0 / (1.0 + x)),
            |_| 0.5,
        ],
        validity_floor: OCCUPANCY_FLOOR,
    }
}

/// Circle pair correlation as a function of separation (valid for `L ≥ 20`).
pub fn pair_correlation_formula() -> PiecewiseFormula {
    PiecewiseFormula {
        name: "pair-correlation",
        domain_lo: 0.0,
        breakpoints: vec![1.0, 2.0, 3.0, 4.0],
        pieces: vec![
            |x| 0.25 * (2.0 + ln(27.0) - 3.0 * ln(x + 3.0)),
            |x| 0.25 * (x * x / 8.0 - x + 23.0 / 8.0 - ln(64.0 / 27.0)),
            |x| 0.25 * (19.0 / 8.0 - 0.5 * x - 3.0 * ln(4.0 / (x + 1.0))),
            |x| 0.25 * (x - x * x / 8.0 - 1.0),
            |_| 0.25,
        ],
        validity_floor: PAIR_CORRELATION_FLOOR,
    }
}

/// Probability that candidate number `t` is accepted on `[0, L]`.
pub fn success_prob(t: u64, length: f64) -> Result<f64> {
    if t < 1 {
        return Err(Error::precondition("candidate time must be at least 1"));
    }
    if !(length >= SUCCESS_PROB_FLOOR) {
        return Err(Error::BelowValidityFloor {
            what: "L",
            value: length,
            floor: SUCCESS_PROB_FLOOR,
        });
    }
    let t = t as f64;
    let q3 = (length - 3.0) / length;
    let q4 = (length - 4.0) / length;
    // 2((L-3)^t - (L-4)^t) / (t L^t) + ((L-4)/L)^t, in a form that cannot overflow
    Ok(2.0 * (q3.powf(t) - q4.powf(t)) / t + q4.powf(t))
}

/// `Σ_t success_prob(t, L)` truncated once the geometric tail bound drops
/// below `tol`. Returns `(sum, tail_bound)`.
pub fn success_prob_sum(length: f64, tol: f64) -> Result<(f64, f64)> {
    let q3 = (length - 3.0) / length;
    let q4 = (length - 4.0) / length;
    let mut terms = Vec::new();
    let mut t = 1u64;
    loop {
        terms.push(success_prob(t, length)?);
        // for s > t: P_s(s) <= (2/s) q3^s + q4^s, so the tail is bounded by two geometric series
        let tf = t as f64;
        let tail = 2.0 / (tf + 1.0) * q3.powf(tf + 1.0) / (1.0 - q3) + q4.powf(tf + 1.0) / (1.0 - q4);
        if tail < tol {
            // sum smallest terms first
            terms.reverse();
            return Ok((terms.iter().sum(), tail));
        }
        t += 1;
    }
}

/// Expected terminal rod count.
pub fn expected_rods_ghost(length: f64, geometry: Geometry) -> Result<f64> {
    match geometry {
        Geometry::Interval => {
            if !(length >= SUCCESS_PROB_FLOOR) {
                return Err(Error::BelowValidityFloor {
                    what: "L",
                    value: length,
                    floor: SUCCESS_PROB_FLOOR,
                });
            }
            // ln(16/9) = 4 ln 2 - 2 ln 3
            Ok(length / 4.0 + 4.0 * LN_2 - 2.0 * 3f64.ln() - 1.0)
        }
        Geometry::Circle => {
            if !(length > 4.0) {
                return Err(Error::BelowValidityFloor {
                    what: "L",
                    value: length,
                    floor: 4.0,
                });
            }
            Ok(length / 4.0)
        }
    }
}

/// Probability that `x ∈ [0, L]` is covered at termination on an interval.
pub fn occupancy(x: f64, length: f64) -> Result<f64> {
    if !(length >= OCCUPANCY_FLOOR) {
        return Err(Error::BelowValidityFloor {
            what: "L",
            value: length,
            floor: OCCUPANCY_FLOOR,
        });
    }
    if !(0.0..=length).contains(&x) {
        return Err(Error::precondition(format!(
            "x = {x} lies outside [0, {length}]"
        )));
    }
    let d = if x > length / 2.0 { length - x } else { x };
    Ok(occupancy_formula().eval(d))
}

/// Probability that two points at circle distance `x` are both covered.
pub fn pair_correlation_circle(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::precondition(format!(
            "separation must be positive, got {x}"
        )));
    }
    Ok(pair_correlation_formula().eval(x))
}

/// Probability that the point at distance `x` to the right of a covered point
/// is covered, given that the rod through the covered point extends `sigma`
/// to its right in the cut-and-unroll construction (`sigma ∈ [0, 2]`).
pub fn conditional_pair_occupancy(x: f64, sigma: f64) -> f64 {
    if x <= sigma {
        return 1.0;
    }
    if sigma >= 1.0 {
        if x <= 2.0 + sigma {
            (x - sigma) / 4.0
        } else {
            0.5
        }
    } else if x <= 1.0 {
        ln((3.0 + x) / (3.0 + sigma))
    } else if x < 2.0 + sigma {
        (x - 1.0) / 4.0 + ln(4.0 / (3.0 + sigma))
    } else if x < 3.0 {
        (x - 1.0) / 4.0 + ln(4.0 / (x + 1.0))
    } else {
        0.5
    }
}

/// Pair correlation recomputed by integrating the conditional occupancy over
/// `sigma`: `(1/4) ∫_0^2 π(x | σ) dσ`.
pub fn pair_correlation_by_sigma_average(x: f64) -> f64 {
    let breaks = [1.0, x, x - 2.0];
    0.25 * quadrature::integrate(|s| conditional_pair_occupancy(x, s), 0.0, 2.0, &breaks, 0.25)
}

/// `∫_0^L occupancy(x, L) dx` by piecewise Gauss–Legendre.
pub fn occupancy_mass(length: f64) -> Result<f64> {
    if !(length >= OCCUPANCY_FLOOR) {
        return Err(Error::BelowValidityFloor {
            what: "L",
            value: length,
            floor: OCCUPANCY_FLOOR,
        });
    }
    let f = occupancy_formula();
    let half = length / 2.0;
    let one_side = quadrature::integrate(|x| f.eval(x), 0.0, half, &[1.0, 2.0, 3.0], 0.5);
    Ok(2.0 * one_side)
}
