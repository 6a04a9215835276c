//! The Gibbs measure at `(t(q), q)` as an i.i.d. law on accelerated blocks.
//!
//! On the induced full shift the weights are locally constant, so the cylinder
//! of blocks `(n_1, ..., n_l)` has mass `prod p_(n_k)` with
//! `p_n = 2^(-t n - q (2^n - 1))`; sampling the measure is sampling blocks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{BlockDecomposition, Digit, DigitSource, DigitStream, StreamKind};
use crate::error::{Error, Result};
use crate::pressure::{solve_t, SOLVER_TOL};
use crate::rng::{derive_seed, rng_from_seed};

/// Upper limit on `N_cut`; weights past it underflow for every `q > 0` the
/// pressure solver accepts.
const MAX_BLOCK: usize = 1023;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsDistribution {
    pub q: f64,
    pub t: f64,
    /// `p_n` for `n = 1..=n_cut` at index `n - 1`.
    pub probabilities: Vec<f64>,
    /// `sum (2^n - 1) p_n / sum n p_n` from the truncated weights.
    pub alpha: f64,
    /// `alpha - 1 = sum (2^n - 1 - n) p_n / sum n p_n`, resolved even when
    /// `alpha` rounds to 1 (large `q`).
    pub alpha_excess: f64,
    /// `-t'(q)` from the implicit derivative, for cross-checking `alpha`.
    pub alpha_from_slope: f64,
    pub n_cut: usize,
    /// Certified bound on `sum_{n > n_cut} p_n`.
    pub tail_mass: f64,
    cdf: Vec<f64>,
}

impl GibbsDistribution {
    pub fn p(&self, n: u64) -> f64 {
        match n {
            0 => 0.0,
            n => self.probabilities.get(n as usize - 1).copied().unwrap_or(0.0),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().rev().sum()
    }

    /// `E[n] = sum n p_n`.
    pub fn mean_block(&self) -> f64 {
        weighted(&self.probabilities, |n| n)
    }

    /// `Var[n]`.
    pub fn block_variance(&self) -> f64 {
        let m = self.mean_block();
        weighted(&self.probabilities, |n| n * n) - m * m
    }

    /// `t + q alpha`, the local dimension of the measure.
    pub fn localdim_target(&self) -> f64 {
        self.t + self.q * self.alpha
    }

    /// Block entropy over mean block length, `sum p log2(1/p) / sum n p`, in
    /// bits per digit.
    pub fn entropy_rate(&self) -> f64 {
        let h: f64 = self
            .probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum();
        h / self.mean_block()
    }

    /// Inverse-CDF draw; the omitted tail is folded into the last atom.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.n_cut - 1) as u64 + 1
    }
}

fn weighted(p: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    p.iter()
        .enumerate()
        .rev()
        .map(|(i, &pn)| f((i + 1) as f64) * pn)
        .sum()
}

/// `p_n` for `n = 1..` until the omitted tail mass is below `tol`.
pub fn build_distribution(q: f64, tol: f64) -> Result<GibbsDistribution> {
    let sol = solve_t(q, SOLVER_TOL.min(tol))?;
    let t = sol.t_of_q;
    let weight = |n: usize| {
        let nf = n as f64;
        (-t * nf - q * (nf.exp2() - 1.0)).exp2()
    };
    let mut probabilities = Vec::new();
    let mut tail_mass = f64::INFINITY;
    for n in 1..=MAX_BLOCK {
        probabilities.push(weight(n));
        // past the mode the ratio p_(k+1)/p_k = 2^(-t - q 2^k) decreases in k,
        // so the tail after n is at most p_(n+1) / (1 - r)
        let r = (-t - q * (n as f64 + 1.0).exp2()).exp2();
        // keep at least two atoms so that alpha - 1 stays resolved
        if r < 1.0 && n >= 2 {
            let bound = weight(n + 1) / (1.0 - r);
            if bound < tol {
                tail_mass = bound;
                break;
            }
        }
    }
    if !tail_mass.is_finite() {
        return Err(Error::Precondition(format!(
            "Gibbs tail at q = {q} does not fall below {tol} within {MAX_BLOCK} blocks"
        )));
    }
    let n_cut = probabilities.len();
    let num = weighted(&probabilities, |n| n.exp2() - 1.0);
    let den = weighted(&probabilities, |n| n);
    let excess = weighted(&probabilities, |n| n.exp2() - 1.0 - n);
    let mut cdf = Vec::with_capacity(n_cut);
    let mut acc = 0.0;
    for &p in &probabilities {
        acc += p;
        cdf.push(acc);
    }
    *cdf.last_mut().expect("n_cut >= 1") = 1.0;
    Ok(GibbsDistribution {
        q,
        t,
        probabilities,
        alpha: num / den,
        alpha_excess: excess / den,
        alpha_from_slope: -sol.t_prime,
        n_cut,
        tail_mass,
        cdf,
    })
}

/// `ell` i.i.d. blocks drawn with the generator seeded by `seed`.
pub fn sample_blocks(dist: &GibbsDistribution, ell: usize, seed: u64) -> BlockDecomposition {
    let mut rng = rng_from_seed(seed);
    BlockDecomposition::from_blocks((0..ell).map(|_| dist.draw(&mut rng)).collect())
}

struct GibbsSource {
    dist: GibbsDistribution,
    rng: ChaCha8Rng,
    /// Zeros still to emit before the closing 1 of the current block.
    zeros_left: u64,
    in_block: bool,
}

impl DigitSource for GibbsSource {
    fn next_digit(&mut self) -> Option<Digit> {
        if !self.in_block {
            self.zeros_left = self.dist.draw(&mut self.rng) - 1;
            self.in_block = true;
        }
        if self.zeros_left > 0 {
            self.zeros_left -= 1;
            Some(Digit::Zero)
        } else {
            self.in_block = false;
            Some(Digit::One)
        }
    }
}

/// The Gibbs-typical point whose blocks are the infinite continuation of
/// [`sample_blocks`] under the same seed.
pub fn gibbs_stream(dist: &GibbsDistribution, seed: u64) -> DigitStream {
    DigitStream::from_source(
        StreamKind::GibbsSampled,
        Box::new(GibbsSource {
            dist: dist.clone(),
            rng: rng_from_seed(seed),
            zeros_left: 0,
            in_block: false,
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsStatistics {
    pub q: f64,
    pub t: f64,
    pub alpha: f64,
    pub localdim_hat: f64,
    pub localdim_target: f64,
    pub ell: usize,
    pub reps: usize,
    pub seed: u64,
    pub max_block_seen: u64,
    /// `ell * reps`.
    pub samples: usize,
    pub mean_block: f64,
    /// Mean over replicates of `sum (2^n_k - 1) / sum n_k`.
    pub alpha_hat: f64,
    /// Standard error of `alpha_hat` across replicates.
    pub alpha_se: f64,
}

struct Replicate {
    alpha: f64,
    localdim: f64,
    block_total: u64,
    max_block: u64,
}

fn replicate(dist: &GibbsDistribution, ell: usize, seed: u64) -> Replicate {
    let mut rng = rng_from_seed(seed);
    let (mut len, mut phi, mut max_block) = (0u64, 0.0f64, 0u64);
    for _ in 0..ell {
        let n = dist.draw(&mut rng);
        len += n;
        phi += (n as f64).exp2() - 1.0;
        max_block = max_block.max(n);
    }
    let lenf = len as f64;
    Replicate {
        alpha: phi / lenf,
        localdim: (dist.t * lenf + dist.q * phi) / lenf,
        block_total: len,
        max_block,
    }
}

/// Replicate `r` uses the seed `derive_seed(seed, r)`.
pub fn gibbs_statistics(dist: &GibbsDistribution, ell: usize, reps: usize, seed: u64) -> Result<GibbsStatistics> {
    if ell == 0 || reps == 0 {
        return Err(Error::Precondition("ell and reps must be at least 1".into()));
    }
    let runs: Vec<Replicate> = (0..reps)
        .into_par_iter()
        .map(|r| replicate(dist, ell, derive_seed(seed, r as u64)))
        .collect();
    let repsf = reps as f64;
    let alpha_hat = runs.iter().map(|r| r.alpha).sum::<f64>() / repsf;
    let alpha_se = if reps > 1 {
        let var = runs.iter().map(|r| (r.alpha - alpha_hat).powi(2)).sum::<f64>() / (repsf - 1.0);
        (var / repsf).sqrt()
    } else {
        f64::NAN
    };
    let total: u64 = runs.iter().map(|r| r.block_total).sum();
    Ok(GibbsStatistics {
        q: dist.q,
        t: dist.t,
        alpha: dist.alpha,
        localdim_hat: runs.iter().map(|r| r.localdim).sum::<f64>() / repsf,
        localdim_target: dist.localdim_target(),
        ell,
        reps,
        seed,
        max_block_seen: runs.iter().map(|r| r.max_block).max().unwrap_or(0),
        samples: ell * reps,
        mean_block: total as f64 / (ell * reps) as f64,
        alpha_hat,
        alpha_se,
    })
}
