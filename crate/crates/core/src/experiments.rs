//! Monte Carlo checks: the weak law for `S_n / (n ln n)`, the tail-sum
//! dichotomy series, entropy-rate dimension proxies and digit frequencies on
//! level sets. Every sample `i` draws from `derive_seed(seed, i)`, so reports
//! do not depend on the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::f_m_stream;
use crate::dyadic::{BlockWalker, DigitStream};
use crate::error::{Error, Result};
use crate::gibbs::{build_distribution, gibbs_stream, GibbsDistribution};
use crate::growth::GrowthFunction;
use crate::rng::derive_seed;
use crate::spectrum::dim_at_alpha;

pub const QUANTILE_LEVELS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

/// Tail tolerance for distributions built inside experiments.
const GIBBS_TOL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileReport {
    pub n: u64,
    pub samples: usize,
    pub seed: u64,
    /// Keyed by the level written as in [`QUANTILE_LEVELS`].
    pub quantiles: BTreeMap<String, f64>,
    pub target: f64,
    /// The same quantiles for `S_M / (n ln n)` with `M <= n` the last block
    /// boundary, where `S_M = 2 S^_l - l`.
    pub boundary_quantiles: BTreeMap<String, f64>,
}

impl QuantileReport {
    pub fn quantile(&self, level: f64) -> Option<f64> {
        self.quantiles.get(&level.to_string()).copied()
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5).expect("median is always reported")
    }

    pub fn iqr(&self) -> f64 {
        self.quantile(0.75).unwrap() - self.quantile(0.25).unwrap()
    }
}

/// Linear interpolation between order statistics (type 7).
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn quantile_map(mut values: Vec<f64>) -> BTreeMap<String, f64> {
    values.sort_by(f64::total_cmp);
    QUANTILE_LEVELS
        .iter()
        .map(|&l| (l.to_string(), quantile_sorted(&values, l)))
        .collect()
}

/// `(S_n, 2 S^_l - l)` for the last complete block boundary at or before `n`.
fn sum_and_boundary_sum(stream: DigitStream, n: usize) -> Result<(BigUint, BigUint)> {
    let mut walker = BlockWalker::new(stream);
    let mut hat = BigUint::ZERO;
    let mut ell = 0u64;
    loop {
        let boundary = BigUint::from(2u32) * &hat - ell;
        let block = walker.next_block().ok_or(Error::InsufficientDigits {
            position: walker.consumed() + 1,
        })?;
        if block.end >= n {
            let s_n = walker.sum_at(&block, n);
            let boundary = if block.end == n { s_n.clone() } else { boundary };
            return Ok((s_n, boundary));
        }
        hat += BigUint::from(1u32) << (block.len - 1);
        ell += 1;
    }
}

/// Limit in probability of `S_n / (n ln n)` for Lebesgue-typical points.
///
/// Each block contributes `phi = 2^k` with probability `2^-(k+1)`, so the
/// truncated mean grows like `log2(y) / 2` and the classical normalization
/// picks up a factor one half: the limit is `1 / (2 ln 2)`, not `1 / ln 2`.
pub const WEAK_LAW_LIMIT: f64 = 1.0 / (2.0 * std::f64::consts::LN_2);

/// Quantiles of `S_n / (n ln n)` over uniform-random points.
pub fn weak_law(n: u64, samples: usize, seed: u64) -> Result<QuantileReport> {
    if n < 16 {
        return Err(Error::Precondition(format!("weak law needs n >= 16, got {n}")));
    }
    if samples < 100 {
        return Err(Error::Precondition(format!(
            "weak law needs at least 100 samples, got {samples}"
        )));
    }
    let norm = n as f64 * (n as f64).ln();
    let pairs: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let stream = DigitStream::uniform(derive_seed(seed, i as u64));
            let (s, b) = sum_and_boundary_sum(stream, n as usize)?;
            Ok((big_to_f64(&s) / norm, big_to_f64(&b) / norm))
        })
        .collect::<Result<_>>()?;
    let (direct, boundary): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(QuantileReport {
        n,
        samples,
        seed,
        quantiles: quantile_map(direct),
        target: WEAK_LAW_LIMIT,
        boundary_quantiles: quantile_map(boundary),
    })
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `S_n / (n ln n)` for a single stream.
pub fn weak_law_statistic(stream: DigitStream, n: u64) -> Result<f64> {
    let (s, _) = sum_and_boundary_sum(stream, n as usize)?;
    Ok(big_to_f64(&s) / (n as f64 * (n as f64).ln()))
}

/// Thresholds `Psi_n` for the series `sum lambda(phi >= Psi_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Growth(GrowthFunction),
    Constant(f64),
}

impl Threshold {
    /// `ceil(log2 Psi_n)`, or `None` when `Psi_n <= 1`.
    fn ceil_log2(&self, n: u64) -> Option<i64> {
        match *self {
            Threshold::Constant(c) => (c > 1.0).then(|| c.log2().ceil() as i64),
            Threshold::Growth(GrowthFunction::Power(a)) if a.fract() == 0.0 && a < 64.0 => {
                let v = (n as u128).checked_pow(a as u32);
                match v {
                    Some(v) if v > 1 => Some(128 - (v - 1).leading_zeros() as i64),
                    Some(_) => None,
                    None => Some(GrowthFunction::Power(a).log2_at(n as f64).ceil() as i64),
                }
            }
            Threshold::Growth(psi) => {
                if n < 2 {
                    return match psi {
                        GrowthFunction::DoubleExp(_) => Some(1),
                        _ => None,
                    };
                }
                let l = psi.log2_at(n as f64);
                (l > 0.0).then(|| l.ceil() as i64)
            }
        }
    }

    /// `lambda(phi >= Psi_n) = 2^-ceil(log2 Psi_n)`, and 1 when `Psi_n <= 1`.
    pub fn tail_measure(&self, n: u64) -> f64 {
        match self.ceil_log2(n) {
            Some(k) => (-(k as f64)).exp2(),
            None => 1.0,
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    /// A growth spec, or `const:C`.
    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("const:") {
            Some(c) => c
                .parse::<f64>()
                .ok()
                .filter(|c| c.is_finite() && *c > 0.0)
                .map(Threshold::Constant)
                .ok_or_else(|| Error::Parse(format!("bad constant threshold {s:?}"))),
            None => s.parse().map(Threshold::Growth),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Growth(g) => write!(f, "{g}"),
            Threshold::Constant(c) => write!(f, "const:{c}"),
        }
    }
}

/// Partial sums `sum_{n <= k} lambda(phi >= Psi_n)` for `k = 1..=N`.
pub fn dichotomy_series(threshold: &Threshold, n: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    let mut acc = 0.0;
    Ok((1..=n)
        .map(|k| {
            acc += threshold.tail_measure(k);
            acc
        })
        .collect())
}

/// Seeded stream families for entropy estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceSpec {
    Uniform,
    Fm(usize),
    Gibbs(f64),
}

impl FromStr for SourceSpec {
    type Err = Error;

    /// `uniform` | `fm:M` | `gibbs:Q`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown source {s:?} (expected uniform, fm:M or gibbs:Q)"));
        if s == "uniform" {
            Ok(SourceSpec::Uniform)
        } else if let Some(m) = s.strip_prefix("fm:") {
            m.parse().map(SourceSpec::Fm).map_err(|_| bad())
        } else if let Some(q) = s.strip_prefix("gibbs:") {
            q.parse().map(SourceSpec::Gibbs).map_err(|_| bad())
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Uniform => write!(f, "uniform"),
            SourceSpec::Fm(m) => write!(f, "fm:{m}"),
            SourceSpec::Gibbs(q) => write!(f, "gibbs:{q}"),
        }
    }
}

/// A seeded stream factory.
pub enum StreamFactory {
    Uniform,
    Fm(usize),
    Gibbs(Box<GibbsDistribution>),
}

impl StreamFactory {
    pub fn new(spec: SourceSpec) -> Result<Self> {
        Ok(match spec {
            SourceSpec::Uniform => StreamFactory::Uniform,
            SourceSpec::Fm(m) => {
                f_m_stream(m, 0)?;
                StreamFactory::Fm(m)
            }
            SourceSpec::Gibbs(q) => StreamFactory::Gibbs(Box::new(build_distribution(q, GIBBS_TOL)?)),
        })
    }

    pub fn stream(&self, seed: u64) -> DigitStream {
        match self {
            StreamFactory::Uniform => DigitStream::uniform(seed),
            StreamFactory::Fm(m) => f_m_stream(*m, seed).expect("m checked in constructor"),
            StreamFactory::Gibbs(d) => gibbs_stream(d, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub source: String,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    /// Plug-in Shannon entropy of depth-prefixes over `depth`, bits per digit.
    pub estimate: f64,
    pub distinct_prefixes: usize,
}

/// Largest supported prefix depth (prefixes are packed into a `u32`).
pub const MAX_DEPTH: usize = 32;

pub fn entropy_dim_estimate(factory: &StreamFactory, depth: usize, samples: usize, seed: u64) -> Result<f64> {
    entropy_report(factory, "custom", depth, samples, seed).map(|r| r.estimate)
}

pub fn entropy_report(
    factory: &StreamFactory,
    label: &str,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<EntropyReport> {
    if !(4..=MAX_DEPTH).contains(&depth) {
        return Err(Error::Precondition(format!("depth must lie in [4, {MAX_DEPTH}], got {depth}")));
    }
    let needed = 10usize.saturating_mul(1usize << depth);
    if samples < needed {
        return Err(Error::Undersampled { samples, depth, needed });
    }
    let mut keys: Vec<u32> = (0..samples)
        .into_par_iter()
        .map(|i| {
            factory
                .stream(derive_seed(seed, i as u64))
                .take(depth)
                .fold(0u32, |acc, d| (acc << 1) | d.is_one() as u32)
        })
        .collect();
    keys.par_sort_unstable();
    let total = samples as f64;
    let mut entropy = 0.0;
    let mut distinct = 0;
    for run in keys.chunk_by(|a, b| a == b) {
        let p = run.len() as f64 / total;
        entropy -= p * p.log2();
        distinct += 1;
    }
    Ok(EntropyReport {
        source: label.to_string(),
        depth,
        samples,
        seed,
        estimate: entropy / depth as f64,
        distinct_prefixes: distinct,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub alpha: f64,
    /// `None` at `alpha = 1` (all-ones stream).
    pub q0: Option<f64>,
    pub prefix_length: usize,
    pub seed: u64,
    pub frequency: f64,
    /// `1 / sum n p_n`.
    pub target: f64,
    /// Renewal-theory standard deviation of the frequency.
    pub sigma: f64,
}

/// Frequency of the digit 1 along a Gibbs point of `E(alpha)`.
pub fn e_alpha_frequency_check(alpha: f64, prefix_length: usize, seed: u64) -> Result<FrequencyReport> {
    let sample = dim_at_alpha(alpha, 1e-15)?;
    let Some(q0) = sample.q0.finite() else {
        let ones = DigitStream::all_ones().take(prefix_length).filter(|d| d.is_one()).count();
        return Ok(FrequencyReport {
            alpha,
            q0: None,
            prefix_length,
            seed,
            frequency: ones as f64 / prefix_length as f64,
            target: 1.0,
            sigma: 0.0,
        });
    };
    let dist = build_distribution(q0, GIBBS_TOL)?;
    let ones = gibbs_stream(&dist, seed)
        .take(prefix_length)
        .filter(|d| d.is_one())
        .count();
    let mu = dist.mean_block();
    Ok(FrequencyReport {
        alpha,
        q0: Some(q0),
        prefix_length,
        seed,
        frequency: ones as f64 / prefix_length as f64,
        target: 1.0 / mu,
        sigma: (dist.block_variance() / (mu.powi(3) * prefix_length as f64)).sqrt(),
    })
}
