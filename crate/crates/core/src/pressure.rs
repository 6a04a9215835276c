//! The pressure series `P(t, q) = ln sum_{j>=1} 2^(-t j - q (2^j - 1))`, its
//! partial derivatives and the implicit root `t(q)`.
//!
//! Every quantity downstream (`t(q)`, `t'(q)`, the spectrum) is a ratio or a
//! zero of the series, so the choice of logarithm base does not matter; the
//! natural log is used throughout.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of series terms; `2^j` overflows `f64` past 1023.
const MAX_TERMS: usize = 1023;
const BISECTION_WIDTH: f64 = 1e-14;
const NEWTON_STEPS: usize = 5;
/// Relative tail tolerance used by [`solve_t`].
pub const SOLVER_TOL: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureEvaluation {
    pub t: f64,
    pub q: f64,
    /// `P(t, q)` in nats.
    pub value: f64,
    #[serde(rename = "dP_dt")]
    pub dp_dt: f64,
    #[serde(rename = "dP_dq")]
    pub dp_dq: f64,
    pub terms_used: usize,
    /// Certified bound on the omitted tail, relative to the partial sum.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureSolution {
    pub q: f64,
    pub t_of_q: f64,
    /// `1 - t(q)`, accurate to relative precision even when `t(q)` rounds to 1.
    pub deficit: f64,
    /// `t(q) + q`, accurate to relative precision even when it underflows
    /// the spacing of `f64` around `-q`.
    pub floor_gap: f64,
    pub t_prime: f64,
    /// `-1 - t'(q)`, computed without cancellation.
    pub slope_excess: f64,
    /// `|P(t(q), q)|`.
    pub residual: f64,
    /// Initial root bracket in `t`.
    pub bracket: (f64, f64),
    pub terms_used: usize,
}

/// Base-2 exponent of the `j`-th weight.
#[inline]
fn weight_exponent(t: f64, q: f64, j: usize) -> f64 {
    let jf = j as f64;
    -t * jf - q * (jf.exp2() - 1.0)
}

/// Initial truncation `max(64, ceil(log2(1/q)) + 64)`.
pub fn base_truncation(q: f64) -> usize {
    let extra = (1.0 / q).log2().ceil();
    let extra = if extra.is_finite() && extra > 0.0 {
        extra as usize
    } else {
        0
    };
    (extra + 64).clamp(64, MAX_TERMS)
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveQ(q))
    }
}

/// Truncation index `J` and relative tail bound for the series at `(t, q)`.
///
/// The ratio of consecutive weights `2^(-t - q 2^j)` decreases in `j`, so once
/// it drops below 1 the tail past `J` is bounded by a geometric series.
fn truncation(t: f64, q: f64, tol: f64, max_exp: f64, scaled_sum: f64) -> (usize, f64) {
    let mut j = base_truncation(q);
    loop {
        let next = j + 1;
        let ratio = (-t - q * (next as f64).exp2()).exp2();
        let rel_term = (weight_exponent(t, q, next) - max_exp).exp2() / scaled_sum;
        let bound = if ratio < 1.0 {
            rel_term / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if bound <= tol || j >= MAX_TERMS {
            return (j, bound.min(f64::MAX));
        }
        j += 1;
    }
}

struct WeightedSums {
    max_exp: f64,
    /// Sum of `2^(e_j - max_exp)`.
    total: f64,
    /// Sum of `j 2^(e_j - max_exp)`.
    first: f64,
    /// Sum of `(2^j - 1) 2^(e_j - max_exp)`.
    potential: f64,
    /// Sum of `(2^j - 1 - j) 2^(e_j - max_exp)`.
    excess: f64,
}

fn weighted_sums(t: f64, q: f64, terms: usize) -> WeightedSums {
    let max_exp = (1..=terms)
        .map(|j| weight_exponent(t, q, j))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut s = WeightedSums {
        max_exp,
        total: 0.0,
        first: 0.0,
        potential: 0.0,
        excess: 0.0,
    };
    for j in 1..=terms {
        let r = (weight_exponent(t, q, j) - max_exp).exp2();
        if r == 0.0 {
            continue;
        }
        let jf = j as f64;
        let pot = jf.exp2() - 1.0;
        s.total += r;
        s.first += jf * r;
        s.potential += pot * r;
        s.excess += (pot - jf) * r;
    }
    s
}

fn series_terms(t: f64, q: f64, tol: f64) -> (WeightedSums, usize, f64) {
    let mut terms = base_truncation(q);
    loop {
        let sums = weighted_sums(t, q, terms);
        let (needed, bound) = truncation(t, q, tol, sums.max_exp, sums.total);
        if needed <= terms {
            return (sums, terms, bound);
        }
        terms = needed;
    }
}

/// Evaluates `P(t, q)` and its partials over a certified truncation.
pub fn eval_pressure(t: f64, q: f64, tol: f64) -> Result<PressureEvaluation> {
    check_q(q)?;
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTol(tol));
    }
    let (s, terms, tail_bound) = series_terms(t, q, tol);
    Ok(PressureEvaluation {
        t,
        q,
        value: LN_2 * (s.max_exp + s.total.log2()),
        dp_dt: -LN_2 * s.first / s.total,
        dp_dq: -LN_2 * s.potential / s.total,
        terms_used: terms,
        tail_bound,
    })
}

/// `sum_j w_j - 1` at `t = 1 - deficit`, arranged to avoid cancellation.
///
/// For `q < 1` the root sits near `t = 1`, where the weights are close to
/// `2^-j`; the sum is written as `sum 2^-j expm1(ln2 (deficit j - q (2^j - 1))) - 2^-J`.
/// For `q >= 1` the first weight dominates and the sum is written as
/// `expm1(ln2 (deficit - 1 - q)) + sum_{j>=2} w_j`.
fn normalized_excess(deficit: f64, q: f64, terms: usize) -> f64 {
    if q < 1.0 {
        let mut acc = 0.0;
        for j in (1..=terms).rev() {
            let jf = j as f64;
            let x = deficit * jf - q * (jf.exp2() - 1.0);
            acc += (-jf).exp2() * (LN_2 * x).exp_m1();
        }
        acc - (-(terms as f64)).exp2()
    } else {
        let t = 1.0 - deficit;
        let mut tail = 0.0;
        for j in (2..=terms).rev() {
            tail += weight_exponent(t, q, j).exp2();
        }
        (LN_2 * (deficit - 1.0 - q)).exp_m1() + tail
    }
}

/// `d/d(deficit)` of [`normalized_excess`], i.e. `ln2 sum j w_j`.
fn normalized_excess_slope(deficit: f64, q: f64, terms: usize) -> f64 {
    let t = 1.0 - deficit;
    let mut acc = 0.0;
    for j in (1..=terms).rev() {
        acc += j as f64 * weight_exponent(t, q, j).exp2();
    }
    LN_2 * acc
}

/// Solves `P(t, q) = 0` for `t` on the bracket `[-q, 1]`.
///
/// Bisection (in the deficit `1 - t`) to width `1e-14`, then at most five
/// Newton steps kept inside the bracket.
pub fn solve_t(q: f64, tol: f64) -> Result<PressureSolution> {
    check_q(q)?;
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTol(tol));
    }
    let terms = base_truncation(q);
    // deficit in [0, 1 + q] <=> t in [-q, 1]; the excess increases with deficit
    let (mut lo, mut hi) = (0.0, 1.0 + q);
    let f_lo = normalized_excess(lo, q, terms);
    let f_hi = normalized_excess(hi, q, terms);
    if !(f_lo < 0.0) || f_hi < 0.0 {
        return Err(Error::BracketFailure(format!(
            "q = {q}: excess {f_lo} at t = 1, {f_hi} at t = -q"
        )));
    }
    if f_hi == 0.0 {
        lo = hi;
    }
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if normalized_excess(mid, q, terms) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut deficit = 0.5 * (lo + hi);
    for _ in 0..NEWTON_STEPS {
        let f = normalized_excess(deficit, q, terms);
        let slope = normalized_excess_slope(deficit, q, terms);
        if f == 0.0 || !(slope > 0.0) {
            break;
        }
        let next = deficit - f / slope;
        if !(next >= lo && next <= hi) || next == deficit {
            break;
        }
        deficit = next;
    }

    let t = 1.0 - deficit;
    let (s, used, _) = series_terms(t, q, tol.min(SOLVER_TOL));
    let slope_excess = s.excess / s.first;
    let floor_gap = if q >= 1.0 {
        // 2^-(t + q) + sum_{j>=2} w_j = 1 at the root
        let tail: f64 = (2..=used).rev().map(|j| weight_exponent(t, q, j).exp2()).sum();
        -(-tail).ln_1p() / LN_2
    } else {
        t + q
    };
    let residual = normalized_excess(deficit, q, terms).ln_1p().abs();
    Ok(PressureSolution {
        q,
        t_of_q: t,
        deficit,
        floor_gap,
        t_prime: -1.0 - slope_excess,
        slope_excess,
        residual,
        bracket: (-q, 1.0),
        terms_used: used,
    })
}
