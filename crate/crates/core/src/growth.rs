//! Growth functions `Psi`, the regime table for `lim S_n / Psi(n) = beta`,
//! log-domain ratio traces and the obstruction diagnostics behind the empty
//! regimes.
//!
//! `Psi(n) = 2^(n^gamma)` leaves every fixed precision quickly, so all
//! comparisons are made in `log2`: `log2 S_n` comes from the exact big
//! integer and only the final subtraction is done in floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{log2_big, BlockDecomposition, BlockWalker, Digit};
use crate::error::{Error, Result};

/// `n log n` (natural log), `n^a` with `a > 1`, or `2^(n^gamma)` with `gamma > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthFunction {
    NLogN,
    Power(f64),
    DoubleExp(f64),
}

impl GrowthFunction {
    pub fn power(a: f64) -> Result<Self> {
        if a > 1.0 && a.is_finite() {
            Ok(Self::Power(a))
        } else {
            Err(Error::Parse(format!("power exponent must exceed 1, got {a}")))
        }
    }

    pub fn double_exp(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(Self::DoubleExp(gamma))
        } else {
            Err(Error::Parse(format!("gamma must be positive, got {gamma}")))
        }
    }

    /// `log2 Psi(n)` for real `n >= 2`, unchecked.
    pub fn log2_at(&self, n: f64) -> f64 {
        match *self {
            GrowthFunction::NLogN => n.log2() + n.ln().log2(),
            GrowthFunction::Power(a) => a * n.log2(),
            GrowthFunction::DoubleExp(gamma) => n.powf(gamma),
        }
    }

    /// `round(beta * Psi(n))` as an exact integer, with `Psi(0) = 0`.
    ///
    /// Integer powers with `beta = 1` are exact; every other case carries the
    /// 53-bit relative precision of `log2 Psi`.
    pub fn scaled_round(&self, beta: f64, n: u64) -> BigUint {
        if n == 0 {
            return BigUint::zero();
        }
        if let GrowthFunction::Power(a) = *self {
            if beta == 1.0 && a.fract() == 0.0 && a <= u32::MAX as f64 {
                return BigUint::from(n).pow(a as u32);
            }
        }
        if n == 1 {
            let psi1 = match *self {
                GrowthFunction::NLogN => 0.0,
                GrowthFunction::Power(_) => 1.0,
                GrowthFunction::DoubleExp(_) => 2.0,
            };
            return BigUint::from((beta * psi1).round() as u64);
        }
        pow2_round(beta.log2() + self.log2_at(n as f64))
    }

    pub fn regime(&self) -> GrowthRegime {
        match *self {
            GrowthFunction::NLogN | GrowthFunction::Power(_) => GrowthRegime::Slow,
            GrowthFunction::DoubleExp(g) if g < 0.5 => GrowthRegime::Slow,
            GrowthFunction::DoubleExp(g) if g < 1.0 => GrowthRegime::Intermediate,
            GrowthFunction::DoubleExp(_) => GrowthRegime::Fast,
        }
    }
}

/// `round(2^l)` as a big integer.
pub(crate) fn pow2_round(l: f64) -> BigUint {
    if l < 62.0 {
        return BigUint::from(l.exp2().round() as u64);
    }
    let shift = l.floor() - 52.0;
    let mantissa = (l - shift).exp2().round() as u64;
    BigUint::from(mantissa) << (shift as u64)
}

/// `log2 Psi(n)` with `n >= 2`.
pub fn psi_log2(psi: &GrowthFunction, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::NBelowTwo(n));
    }
    Ok(psi.log2_at(n as f64))
}

impl FromStr for GrowthFunction {
    type Err = Error;

    /// Grammar: `nlogn` | `n^A` | `2^n^G`, decimal or scientific parameters.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let number = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad parameter {p:?} in growth spec {s:?}")))
        };
        if s == "nlogn" {
            Ok(GrowthFunction::NLogN)
        } else if let Some(g) = s.strip_prefix("2^n^") {
            GrowthFunction::double_exp(number(g)?)
        } else if let Some(a) = s.strip_prefix("n^") {
            GrowthFunction::power(number(a)?)
        } else {
            Err(Error::Parse(format!(
                "unknown growth spec {s:?} (expected nlogn, n^A or 2^n^G)"
            )))
        }
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFunction::NLogN => write!(f, "nlogn"),
            GrowthFunction::Power(a) => write!(f, "n^{a}"),
            GrowthFunction::DoubleExp(g) => write!(f, "2^n^{g}"),
        }
    }
}

impl Serialize for GrowthFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GrowthFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthRegime {
    /// `n log n`, `n^a`, `2^(n^gamma)` with `gamma < 1/2`.
    Slow,
    /// `2^(n^gamma)` with `1/2 <= gamma < 1`.
    Intermediate,
    /// `2^(n^gamma)` with `gamma >= 1`.
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaClass {
    Zero,
    FinitePositive,
    Infinity,
}

impl FromStr for BetaClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" => Ok(BetaClass::Zero),
            "finite" | "finite-positive" => Ok(BetaClass::FinitePositive),
            "infinity" | "inf" => Ok(BetaClass::Infinity),
            other => Err(Error::Parse(format!(
                "unknown beta class {other:?} (expected zero, finite or infinity)"
            ))),
        }
    }
}

impl fmt::Display for BetaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaClass::Zero => "zero",
            BetaClass::FinitePositive => "finite-positive",
            BetaClass::Infinity => "infinity",
        })
    }
}

/// `phi` (the Saint-Petersburg potential) or `g(x) = 1/x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Potential {
    Phi,
    G,
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(Potential::Phi),
            "g" => Ok(Potential::G),
            other => Err(Error::Parse(format!(
                "unknown potential {other:?} (expected phi or g)"
            ))),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Potential::Phi => "phi",
            Potential::G => "g",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    FullDimension,
    Empty,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::FullDimension => "full-dimension",
            Verdict::Empty => "empty",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeVerdict {
    pub potential: Potential,
    pub beta_class: BetaClass,
    pub verdict: Verdict,
    /// The mechanism that decides this cell of the table.
    pub citation: String,
}

const CITE_ZERO: &str = "beta = 0: Lebesgue-typical points have S_n / Psi(n) -> 0";
const CITE_SLOW: &str =
    "slow growth: Cantor construction along a sparse checkpoint schedule (full dimension for every beta)";
const CITE_MID_FINITE: &str =
    "1/2 <= gamma < 1, finite beta: block sizes n_j = o(sum^(1-gamma)) force S / Psi -> 0 (empty)";
const CITE_MID_INF: &str =
    "1/2 <= gamma < 1, beta = infinity: zero blocks of length 2^(k delta) at positions 2^k, zero density (full dimension)";
const CITE_FAST_FINITE: &str =
    "gamma >= 1, finite beta: Psi(n) / Psi(n-1) >= 2 while S_n / S_(n-1) -> 1 at 1-digits (empty)";
const CITE_FAST_INF: &str = "gamma >= 1, beta = infinity: liminf S_n / 2^n <= 1 (empty)";
const CITE_G_SUFFIX: &str = "; transferred to g through phi <= g <= 2 phi";

/// The regime table. Verdicts depend only on the growth regime and the
/// class of `beta`, and are identical for both potentials.
pub fn classify(psi: &GrowthFunction, beta_class: BetaClass, potential: Potential) -> RegimeVerdict {
    use BetaClass::*;
    use GrowthRegime::*;
    use Verdict::*;
    let (verdict, cite) = match (psi.regime(), beta_class) {
        (_, Zero) => (FullDimension, CITE_ZERO),
        (Slow, _) => (FullDimension, CITE_SLOW),
        (Intermediate, FinitePositive) => (Empty, CITE_MID_FINITE),
        (Intermediate, Infinity) => (FullDimension, CITE_MID_INF),
        (Fast, FinitePositive) => (Empty, CITE_FAST_FINITE),
        (Fast, Infinity) => (Empty, CITE_FAST_INF),
    };
    let citation = match potential {
        Potential::Phi => cite.to_string(),
        Potential::G => format!("{cite}{CITE_G_SUFFIX}"),
    };
    RegimeVerdict {
        potential,
        beta_class,
        verdict,
        citation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    #[serde(rename = "log2_S")]
    pub log2_s: f64,
    pub log2_psi: f64,
    pub log_ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RatioTrace {
    pub checkpoints: Vec<Checkpoint>,
}

/// `log2 S_n - log2 Psi(n)` at every 1-position `n <= N` and at the position
/// right after it, the two consecutive values that must share a limit if
/// `S_n / Psi(n)` converges. Positions below 2 are skipped.
pub fn ratio_trace<I>(digits: I, psi: &GrowthFunction, n: u64) -> Result<RatioTrace>
where
    I: IntoIterator<Item = Digit>,
{
    let mut walker = BlockWalker::new(digits);
    let mut trace = RatioTrace::default();
    let mut push = |pos: u64, log2_s: f64| {
        if pos >= 2 && pos <= n {
            let log2_psi = psi.log2_at(pos as f64);
            trace.checkpoints.push(Checkpoint {
                n: pos,
                log2_s,
                log2_psi,
                log_ratio: log2_s - log2_psi,
            });
        }
    };
    let mut prev_end = 0u64;
    let mut prev_bits = 0u64;
    let mut prev_log2 = 0.0;
    while prev_end < n {
        let block = walker.next_block().ok_or(Error::InsufficientDigits {
            position: walker.consumed() + 1,
        })?;
        if block.len > 1 && prev_end >= 1 {
            // S_(prev_end + 1) = S_(prev_end) + 2^(len - 1); below the 64
            // leading bits the increment is under half an ulp of the log
            let log2_s = if block.len - 1 + 64 < prev_bits {
                prev_log2
            } else {
                log2_big(&walker.sum_at(&block, block.start))
            };
            push(prev_end + 1, log2_s);
        }
        let end = block.end as u64;
        prev_log2 = log2_big(walker.sum());
        prev_bits = walker.sum().bits();
        push(end, prev_log2);
        prev_end = end;
    }
    Ok(trace)
}

/// `min (log2 S_n - n)` over the 1-positions `n <= N`; never positive since
/// `S_n <= 2^n - 1` whenever digit `n` is a 1.
pub fn liminf_witness<I>(digits: I, n: u64) -> Result<f64>
where
    I: IntoIterator<Item = Digit>,
{
    let mut walker = BlockWalker::new(digits);
    let mut best = f64::INFINITY;
    loop {
        let block = walker.next_block().ok_or(Error::InsufficientDigits {
            position: walker.consumed() + 1,
        })?;
        if block.end as u64 > n {
            break;
        }
        best = best.min(log2_big(walker.sum()) - block.end as f64);
        if block.end as u64 == n {
            break;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWitness {
    /// Block index `l >= 2`.
    pub ell: usize,
    /// `n_1 + ... + n_l`.
    pub position: u64,
    /// `log2(S_(n_1+...+n_l) / S_(n_1+...+n_(l-1)))`.
    pub log2_sum_ratio: f64,
    /// `log2 Psi(M) - log2 Psi(M - 1)` at `M = position`.
    pub psi_step_log2: f64,
    /// Lower bound `gamma (M - 1)^(gamma - 1)` on the step (mean value theorem).
    pub psi_step_lower_bound: f64,
    /// `n_l / (n_1 + ... + n_(l-1))^(1 - gamma)` for `1/2 <= gamma < 1`.
    pub block_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub gamma: f64,
    pub boundaries: Vec<BoundaryWitness>,
    /// For `gamma >= 1`: every boundary step is at least 1 in `log2`.
    pub step_certified: Option<bool>,
}

/// `M^gamma - (M - 1)^gamma` without cancellation.
fn power_step(m: f64, gamma: f64) -> f64 {
    if m <= 1.0 {
        return m.powf(gamma);
    }
    if gamma == 1.0 {
        return 1.0;
    }
    let base = m - 1.0;
    base.powf(gamma) * (gamma * (1.0 / base).ln_1p()).exp_m1()
}

/// Diagnostics along block boundaries for `Psi = 2^(n^gamma)`: the ratio of
/// consecutive boundary sums, the matching `Psi` step and, depending on
/// `gamma`, the block-size slack or the certificate that `Psi` at least
/// doubles per step.
pub fn obstruction_witness(blocks: &BlockDecomposition, psi: &GrowthFunction) -> Result<ObstructionReport> {
    let GrowthFunction::DoubleExp(gamma) = *psi else {
        return Err(Error::WrongKind(psi.to_string()));
    };
    if blocks.len() < 2 {
        return Err(Error::Precondition(
            "obstruction witness needs at least two complete blocks".into(),
        ));
    }
    let mut boundaries = Vec::with_capacity(blocks.len() - 1);
    let mut position = blocks.blocks[0];
    let mut sum = (BigUint::one() << blocks.blocks[0]) - 1u32;
    for (i, &nl) in blocks.blocks.iter().enumerate().skip(1) {
        let prev_position = position;
        let prev_log2 = log2_big(&sum);
        position += nl;
        sum += (BigUint::one() << nl) - 1u32;
        let m = position as f64;
        let block_slack = (0.5..1.0)
            .contains(&gamma)
            .then(|| nl as f64 / (prev_position as f64).powf(1.0 - gamma));
        boundaries.push(BoundaryWitness {
            ell: i + 1,
            position,
            log2_sum_ratio: log2_big(&sum) - prev_log2,
            psi_step_log2: power_step(m, gamma),
            psi_step_lower_bound: gamma * (m - 1.0).powf(gamma - 1.0),
            block_slack,
        });
    }
    let step_certified = (gamma >= 1.0).then(|| {
        boundaries
            .iter()
            .all(|b| b.psi_step_lower_bound >= 1.0 && b.psi_step_log2 >= 1.0)
    });
    Ok(ObstructionReport {
        gamma,
        boundaries,
        step_certified,
    })
}
