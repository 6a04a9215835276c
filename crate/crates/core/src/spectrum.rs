//! The Birkhoff spectrum `alpha -> dim E(alpha) = inf_q t(q) + q alpha`.
//!
//! The infimum sits where `t'(q0) = -alpha`. Writing `t' = -1 - e(q)` with the
//! slope excess `e` decreasing from `+inf` to `0`, `q0` solves `e(q0) = alpha - 1`,
//! found by bisection in `log2 q`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pressure::{solve_t, PressureSolution};

const START_LOG2_Q: f64 = 20.0;
const LIMIT_LOG2_Q: f64 = 60.0;
const LOG2_Q_WIDTH: f64 = 1e-12;

/// Minimizer of `t(q) + q alpha`; infinite only at `alpha = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Q0 {
    Finite(f64),
    AtInfinity,
}

impl Q0 {
    pub fn finite(self) -> Option<f64> {
        match self {
            Q0::Finite(q) => Some(q),
            Q0::AtInfinity => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub alpha: f64,
    pub q0: Q0,
    pub t_q0: f64,
    pub dimension: f64,
    /// `q0` pinned at `2^-60` because `alpha` lies beyond what the search
    /// range resolves; the dimension there already equals 1 to double precision.
    pub saturated: bool,
}

/// `t(q) + q alpha`, arranged to keep full relative precision: near the top
/// (`q < 1`) as `1 - (deficit - q alpha)`, near the bottom as
/// `(t + q) + q (alpha - 1)`.
pub fn legendre_value(sol: &PressureSolution, alpha: f64) -> f64 {
    let q = sol.q;
    if q < 1.0 {
        1.0 - (sol.deficit - q * alpha)
    } else {
        sol.floor_gap + q * (alpha - 1.0)
    }
}

fn solve_at(log2_q: f64, tol: f64) -> Result<PressureSolution> {
    solve_t(log2_q.exp2(), tol)
}

/// `dim E(alpha)` with the minimizing `q0`.
pub fn dim_at_alpha(alpha: f64, tol: f64) -> Result<SpectrumSample> {
    if !(alpha >= 1.0) {
        return Err(Error::AlphaBelowOne(alpha));
    }
    if alpha == 1.0 {
        return Ok(SpectrumSample {
            alpha,
            q0: Q0::AtInfinity,
            t_q0: f64::NEG_INFINITY,
            dimension: 0.0,
            saturated: false,
        });
    }
    let target = alpha - 1.0;
    // excess(lo) >= target > excess(hi)
    let (mut lo, mut hi) = (-START_LOG2_Q, START_LOG2_Q);
    while solve_at(lo, tol)?.slope_excess < target {
        if lo <= -LIMIT_LOG2_Q {
            let sol = solve_at(-LIMIT_LOG2_Q, tol)?;
            return Ok(SpectrumSample {
                alpha,
                q0: Q0::Finite(sol.q),
                t_q0: sol.t_of_q,
                dimension: legendre_value(&sol, alpha).clamp(0.0, 1.0),
                saturated: true,
            });
        }
        hi = lo;
        lo = (2.0 * lo).max(-LIMIT_LOG2_Q);
    }
    while solve_at(hi, tol)?.slope_excess >= target {
        if hi >= LIMIT_LOG2_Q {
            return Err(Error::BracketFailure(format!(
                "alpha = {alpha}: t'(q) + alpha keeps its sign up to q = 2^{LIMIT_LOG2_Q}"
            )));
        }
        lo = hi;
        hi = (2.0 * hi).min(LIMIT_LOG2_Q);
    }
    while hi - lo > LOG2_Q_WIDTH {
        let mid = 0.5 * (lo + hi);
        if solve_at(mid, tol)?.slope_excess >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = solve_at(lo, tol)?;
    let b = solve_at(hi, tol)?;
    // both ends are within 1e-12 of the minimizer; keep the smaller value
    let (va, vb) = (legendre_value(&a, alpha), legendre_value(&b, alpha));
    let (sol, value) = if va <= vb { (a, va) } else { (b, vb) };
    Ok(SpectrumSample {
        alpha,
        q0: Q0::Finite(sol.q),
        t_q0: sol.t_of_q,
        dimension: value.clamp(0.0, 1.0),
        saturated: false,
    })
}

/// `steps` equally spaced samples on `[alpha_min, alpha_max]`, sorted by alpha.
pub fn spectrum_curve(alpha_min: f64, alpha_max: f64, steps: usize, tol: f64) -> Result<Vec<SpectrumSample>> {
    if !(alpha_min >= 1.0 && alpha_min < alpha_max && alpha_max.is_finite()) {
        return Err(Error::BadRange(format!(
            "need 1 <= alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::BadRange(format!("need at least 2 steps, got {steps}")));
    }
    let last = (steps - 1) as f64;
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let alpha = if i == steps - 1 {
                alpha_max
            } else {
                alpha_min + (alpha_max - alpha_min) * i as f64 / last
            };
            dim_at_alpha(alpha, tol)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-15;

    #[test]
    fn endpoint_and_errors() {
        let s = dim_at_alpha(1.0, TOL).unwrap();
        assert_eq!(s.dimension, 0.0);
        assert_eq!(s.q0, Q0::AtInfinity);
        assert_eq!(dim_at_alpha(0.5, TOL), Err(Error::AlphaBelowOne(0.5)));
        assert!(dim_at_alpha(f64::NAN, TOL).is_err());
        assert!(spectrum_curve(2.0, 1.0, 3, TOL).is_err());
        assert!(spectrum_curve(1.0, 2.0, 1, TOL).is_err());
        assert!(spectrum_curve(0.5, 2.0, 3, TOL).is_err());
    }

    #[test]
    fn large_alpha_approaches_one() {
        let s = dim_at_alpha(1e4, TOL).unwrap();
        assert!(s.dimension > 0.99 && s.dimension <= 1.0);
        let s = dim_at_alpha(1e6, TOL).unwrap();
        assert!((0.0..=1.0).contains(&s.dimension));
    }

    #[test]
    fn sample_invariant() {
        for alpha in [1.01, 1.5, 3.0, 20.0] {
            let s = dim_at_alpha(alpha, TOL).unwrap();
            let q0 = s.q0.finite().unwrap();
            assert!((s.dimension - (s.t_q0 + q0 * alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn small_curve() {
        let rows = spectrum_curve(1.0, 2.0, 3, TOL).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].dimension, 0.0);
        assert_eq!(rows[2].alpha, 2.0);
        assert!(rows[0].dimension < rows[1].dimension && rows[1].dimension < rows[2].dimension);
    }

    #[test]
    fn monotone_pairing() {
        let a = dim_at_alpha(1.3, TOL).unwrap().q0.finite().unwrap();
        let b = dim_at_alpha(2.7, TOL).unwrap().q0.finite().unwrap();
        assert!(a > b);
    }

    #[test]
    fn round_trip_through_slope() {
        for q in [0.5, 1.0, 2.0] {
            let sol = solve_t(q, TOL).unwrap();
            let alpha = -sol.t_prime;
            let s = dim_at_alpha(alpha, TOL).unwrap();
            let direct = sol.t_of_q + q * alpha;
            assert!((s.dimension - direct).abs() < 1e-10, "{q}: {} vs {direct}", s.dimension);
        }
    }

    #[test]
    fn golden_at_three_halves() {
        // Independent 40-digit evaluation of inf_q t(q) + 1.5 q.
        let s = dim_at_alpha(1.5, TOL).unwrap();
        assert!((s.dimension - 0.885_905_138_939_565_4).abs() < 1e-8);
        assert!((s.q0.finite().unwrap() - 0.351_059_875_789_189_8).abs() < 1e-8);
    }
}
