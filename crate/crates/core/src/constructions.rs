//! Points with prescribed Birkhoff sums.
//!
//! * [`aligned_value`] / [`approx_word`]: a word whose orbit sum is exactly an
//!   integer `V` slightly above a target `W`, using few `1`s.
//! * [`cantor_stream`]: a point with `S_n / (beta Psi(n)) -> 1`, built level by
//!   level from free filler words, a run of ones and an exact-sum word.
//! * [`infinity_stream`]: long zero runs at dyadic positions, driving
//!   `S_n / 2^(n^gamma)` to infinity on a zero-density set of constraints.
//! * [`f_m_stream`]: fair coins with every `m`-th digit forced to `1`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{
    birkhoff_g_interval_trace, birkhoff_phi_sum, log2_big, BinaryWord, Digit, DigitSource, DigitStream,
    RationalInterval, StreamKind, UniformSource,
};
use crate::error::{Error, Result};
use crate::growth::{classify, BetaClass, GrowthFunction, GrowthRegime, Potential, Verdict};

/// The multiple of `2^(t - n)` chosen inside `[W, W (1 + 2^-n)]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedValue {
    pub w: BigUint,
    pub n: u32,
    /// `floor(log2 W)`.
    pub t: u64,
    pub v: BigUint,
    pub ones: u64,
    pub trailing_zeros: u64,
}

fn floor_log2(w: &BigUint) -> Result<u64> {
    if w.is_zero() {
        return Err(Error::Precondition("W must be positive".into()));
    }
    Ok(w.bits() - 1)
}

/// `V = ceil(W / 2^(t - n)) 2^(t - n)` where `2^t <= W < 2^(t + 1)`.
pub fn aligned_value(w: &BigUint, n: u32) -> Result<AlignedValue> {
    let t = floor_log2(w)?;
    if n as u64 > t {
        return Err(Error::NExceedsT { n, t });
    }
    let shift = t - n as u64;
    let unit = BigUint::one() << shift;
    let v = ((w + &unit - 1u32) >> shift) << shift;
    Ok(AlignedValue {
        w: w.clone(),
        n,
        t,
        ones: v.count_ones(),
        trailing_zeros: v.trailing_zeros().unwrap_or(0),
        v,
    })
}

/// A word together with the exact `phi`-sum it realizes over its own length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumWord {
    pub word: BinaryWord,
    pub target: BigUint,
    /// Binary exponents `t_1 > ... > t_p` of the target.
    pub exponents: Vec<u64>,
}

fn exponents_desc(v: &BigUint) -> Vec<u64> {
    (0..v.bits()).rev().filter(|&i| v.bit(i)).collect()
}

/// One block per binary digit of `V`: `1 0^(t_i - 1) 1 1^s`, or `1^(s + 1)`
/// when `t_i = 0`. Each block starts and ends with a `1`, so its sum does not
/// depend on what follows.
fn sum_blocks(exponents: &[u64], s: u64) -> BinaryWord {
    let mut word = BinaryWord::new();
    for &e in exponents {
        if e > 0 {
            word.push(Digit::One);
            word.extend_from(&BinaryWord::zeros(e as usize - 1));
        }
        word.extend_from(&BinaryWord::ones(s as usize + 1));
    }
    word
}

/// Word of length at most `(n + 2)(2 + log2 W)` whose Birkhoff sum over its
/// own length is exactly `V = aligned_value(W, n).v`.
pub fn approx_word(w: &BigUint, n: u32) -> Result<SumWord> {
    let aligned = aligned_value(w, n)?;
    let exponents = exponents_desc(&aligned.v);
    let word = sum_blocks(&exponents, 0);
    let sum = birkhoff_phi_sum(word.iter(), word.len())?;
    if sum != aligned.v {
        return Err(Error::Precondition(format!(
            "word sum {sum} differs from target {}",
            aligned.v
        )));
    }
    Ok(SumWord {
        word,
        target: aligned.v,
        exponents,
    })
}

/// Variant for `g(x) = 1/x`: every block carries `s` extra closing ones,
/// which pushes each `g`-value within a factor `1 + 2^-s` of `phi`.
/// The `phi`-sum over the word is `V + s p`.
pub fn approx_word_g(w: &BigUint, n: u32, s: u64) -> Result<SumWord> {
    let aligned = aligned_value(w, n)?;
    let exponents = exponents_desc(&aligned.v);
    let word = sum_blocks(&exponents, s);
    Ok(SumWord {
        word,
        target: aligned.v,
        exponents,
    })
}

/// `[W, W (1 + 2^-n)(1 + 2^-s) + 2 s (n + 2)]`, the certified window for the
/// `g`-sum of [`approx_word_g`].
pub fn g_sum_window(w: &BigUint, n: u32, s: u64) -> RationalInterval {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let wr = BigRational::from_integer(BigInt::from(w.clone()));
    let one = BigRational::one();
    let inv_pow2 = |e: u64| BigRational::new(BigInt::one(), BigInt::one() << e);
    let upper = &wr * (&one + inv_pow2(n as u64)) * (&one + inv_pow2(s))
        + BigRational::from_integer(BigInt::from(2 * s * (n as u64 + 2)));
    RationalInterval::new(wr, upper)
}

/// Exact enclosure of `sum_{j < |w|} g(T^j x)` over the cylinder of `w 1`.
pub fn g_word_sum(word: &SumWord) -> Result<RationalInterval> {
    let mut closed = word.word.clone();
    closed.push(Digit::One);
    let trace = birkhoff_g_interval_trace(&closed, word.word.len())?;
    trace
        .last()
        .cloned()
        .ok_or_else(|| Error::Precondition("empty word".into()))
}

/// Filler words drawn from `{u in {0,1}^m : u_m = 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filler {
    /// Always `0^(m-1) 1`.
    Deterministic,
    /// Fair coins in the first `m - 1` digits.
    Seeded,
}

/// One level of the Cantor construction: digits `N_(k-1)+1 ..= N_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub k: u64,
    pub n_prev: u64,
    pub n_k: u64,
    /// `W_k = max(1, round(beta Psi(N_k)) - round(beta Psi(N_(k-1))))`.
    pub w: BigUint,
    /// Precision parameter for the word, `n_k` of the construction.
    pub precision: u32,
    /// Extra closing ones for the `g` variant, equal to `precision`.
    pub s: u64,
    /// Number of filler words.
    pub fillers: u64,
    /// Length of the run of ones between fillers and word.
    pub ones: u64,
    pub word_len: u64,
    /// `phi`-sum of the word; zero on infeasible levels.
    pub word_sum: BigUint,
    /// False when the word plus one filler does not fit; the level is then
    /// filled with ones.
    pub feasible: bool,
}

/// Checkpoints `N_k` and per-level data for a target `beta Psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorSchedule {
    pub psi: GrowthFunction,
    pub beta: f64,
    pub m: usize,
    /// Exponent `delta` of `N_k = floor(k^(1/(1-gamma) + delta))`; `None` for `N_k = k^2`.
    pub delta: Option<f64>,
}

/// Largest number of levels scanned for the first feasible one.
const FEASIBILITY_HORIZON: u64 = 1 << 20;

/// `delta` for the `2^(n^gamma)` schedule: half of `min(1, (1 - gamma/(1-gamma)) / (2 gamma))`.
pub fn schedule_delta(gamma: f64) -> f64 {
    0.5 * (1.0f64).min((1.0 - gamma / (1.0 - gamma)) / (2.0 * gamma))
}

impl CantorSchedule {
    pub fn new(psi: GrowthFunction, beta: f64, m: usize) -> Result<Self> {
        if classify(&psi, BetaClass::FinitePositive, Potential::Phi).verdict != Verdict::FullDimension {
            return Err(Error::RegimeMismatch { psi: psi.to_string() });
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Precondition(format!("beta must be positive and finite, got {beta}")));
        }
        if m < 2 {
            return Err(Error::MBelowTwo(m));
        }
        let delta = match psi {
            GrowthFunction::DoubleExp(g) => Some(schedule_delta(g)),
            _ => None,
        };
        Ok(Self { psi, beta, m, delta })
    }

    /// The `beta = infinity` device for slow `Psi`: track `2^(n^eta)` with
    /// `beta = 1`, where `eta < 1/2` grows strictly faster than `Psi`.
    pub fn for_infinite_beta(psi: GrowthFunction, m: usize) -> Result<Self> {
        if psi.regime() != GrowthRegime::Slow {
            return Err(Error::RegimeMismatch { psi: psi.to_string() });
        }
        let eta = match psi {
            GrowthFunction::DoubleExp(g) => (0.5 * (g + 0.5)).max(0.45),
            _ => 0.45,
        };
        Self::new(GrowthFunction::DoubleExp(eta), 1.0, m)
    }

    pub fn checkpoint(&self, k: u64) -> u64 {
        match (self.psi, self.delta) {
            (GrowthFunction::DoubleExp(g), Some(d)) => (k as f64).powf(1.0 / (1.0 - g) + d).floor() as u64,
            _ => k * k,
        }
    }

    pub fn level(&self, k: u64) -> Result<Level> {
        let n_prev = if k <= 1 { 0 } else { self.checkpoint(k - 1) };
        let n_k = self.checkpoint(k);
        let target = |n: u64| self.psi.scaled_round(self.beta, n);
        let (hi, lo) = (target(n_k), target(n_prev));
        let w = if hi > lo { hi - lo } else { BigUint::zero() }.max(BigUint::one());
        let gap = n_k - n_prev;
        let log2_w = log2_big(&w);
        let precision = log2_w
            .min((gap as f64 / (2.0 + log2_w)).sqrt())
            .floor()
            .max(0.0) as u32;
        let word = approx_word(&w, precision)?;
        let word_len = word.word.len() as u64;
        let m = self.m as u64;
        let feasible = word_len + m <= gap;
        let (fillers, ones, word_sum) = if feasible {
            let rest = gap - word_len;
            (rest / m, rest % m, word.target)
        } else {
            (0, gap, BigUint::zero())
        };
        Ok(Level {
            k,
            n_prev,
            n_k,
            w,
            precision,
            s: precision as u64,
            fillers,
            ones,
            word_len: if feasible { word_len } else { 0 },
            word_sum,
            feasible,
        })
    }

    /// First level whose word and one filler fit in its gap.
    pub fn first_feasible(&self) -> Result<u64> {
        let mut last = None;
        for k in 1..=FEASIBILITY_HORIZON {
            let level = self.level(k)?;
            if level.feasible {
                return Ok(k);
            }
            last = Some(level);
        }
        let level = last.expect("horizon is positive");
        let word = approx_word(&level.w, level.precision)?;
        Err(Error::ScheduleInfeasible {
            level: level.k,
            word_len: word.word.len() as u64,
            m: self.m,
            gap: level.n_k - level.n_prev,
        })
    }

    /// Levels `1..=k` with `N_k >= digits`.
    pub fn levels_through(&self, digits: u64) -> Result<Vec<Level>> {
        let mut out = Vec::new();
        let mut k = 1;
        loop {
            let level = self.level(k)?;
            let done = level.n_k >= digits;
            out.push(level);
            if done {
                return Ok(out);
            }
            k += 1;
        }
    }

    /// Digits of level `k` (filler digits drawn from `filler_bits` when seeded).
    fn level_digits(&self, k: u64, filler: Filler, filler_bits: &mut UniformSource) -> Result<Vec<Digit>> {
        let level = self.level(k)?;
        let mut digits = Vec::with_capacity((level.n_k - level.n_prev) as usize);
        if !level.feasible {
            digits.resize((level.n_k - level.n_prev) as usize, Digit::One);
            return Ok(digits);
        }
        for _ in 0..level.fillers {
            for _ in 1..self.m {
                digits.push(match filler {
                    Filler::Deterministic => Digit::Zero,
                    Filler::Seeded => Digit::from_bit(filler_bits.next_bit()),
                });
            }
            digits.push(Digit::One);
        }
        digits.resize(digits.len() + level.ones as usize, Digit::One);
        let word = approx_word(&level.w, level.precision)?;
        digits.extend(word.word.iter());
        Ok(digits)
    }
}

struct CantorSource {
    schedule: CantorSchedule,
    filler: Filler,
    bits: UniformSource,
    k: u64,
    buffer: Vec<Digit>,
    index: usize,
}

impl DigitSource for CantorSource {
    fn next_digit(&mut self) -> Option<Digit> {
        while self.index == self.buffer.len() {
            self.k += 1;
            self.buffer = self
                .schedule
                .level_digits(self.k, self.filler, &mut self.bits)
                .expect("level data was validated when the stream was built");
            self.index = 0;
        }
        let d = self.buffer[self.index];
        self.index += 1;
        Some(d)
    }
}

/// A point of `E_Psi(beta)` from the level construction. Levels before the
/// first feasible one are all ones, as are any later levels whose word does
/// not fit.
pub fn cantor_stream(psi: GrowthFunction, beta: f64, m: usize, filler: Filler, seed: u64) -> Result<DigitStream> {
    let schedule = CantorSchedule::new(psi, beta, m)?;
    stream_from_schedule(schedule, filler, seed)
}

pub fn stream_from_schedule(schedule: CantorSchedule, filler: Filler, seed: u64) -> Result<DigitStream> {
    schedule.first_feasible()?;
    Ok(DigitStream::from_source(
        StreamKind::CantorConstructed,
        Box::new(CantorSource {
            schedule,
            filler,
            bits: UniformSource::new(seed),
            k: 0,
            buffer: Vec::new(),
            index: 0,
        }),
    ))
}

/// Parameters of the zero-block stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroBlockLayout {
    pub gamma: f64,
    pub delta: f64,
    /// First dyadic index `k` carrying a zero block.
    pub k_start: u32,
}

impl ZeroBlockLayout {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&gamma) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        let delta = 0.5 * (gamma + 1.0);
        // 2^(k delta) > 1 for every k >= 1, and floor(2^(k delta)) < 2^k as delta < 1
        let k_start = (1..64)
            .find(|&k| {
                let len = (k as f64 * delta).exp2().floor() as u64;
                (k as f64 * delta).exp2() > 1.0 && len < (1u64 << k)
            })
            .expect("delta < 1");
        Ok(Self { gamma, delta, k_start })
    }

    /// `floor(2^(k delta))`.
    pub fn block_len(&self, k: u32) -> u64 {
        (k as f64 * self.delta).exp2().floor() as u64
    }

    /// Zero block `k` covers positions `2^k + 1 ..= 2^k + floor(2^(k delta))`.
    pub fn block_range(&self, k: u32) -> (u64, u64) {
        let start = 1u64 << k;
        (start + 1, start + self.block_len(k))
    }

    /// The checkpoint just past zero block `k`, a `1`-position.
    pub fn post_block(&self, k: u32) -> u64 {
        self.block_range(k).1 + 1
    }

    /// `|{constrained positions} ∩ [1, n]|`.
    pub fn constrained_count(&self, n: u64) -> u64 {
        let mut count = 0;
        let mut k = self.k_start;
        while k < 63 && (1u64 << k) < n {
            let (a, b) = self.block_range(k);
            count += b.min(n) + 1 - a;
            k += 1;
        }
        count
    }

    /// `C = 1 / (2^delta - 1)` in `count(N) / N <= C N^(delta - 1)`.
    pub fn density_constant(&self) -> f64 {
        1.0 / (self.delta.exp2() - 1.0)
    }

    fn is_zero(&self, pos: u64) -> bool {
        if pos < 3 {
            return false;
        }
        let k = 63 - (pos - 1).leading_zeros();
        k >= self.k_start && pos - (1u64 << k) <= self.block_len(k)
    }
}

struct ZeroBlockSource {
    layout: ZeroBlockLayout,
    pos: u64,
}

impl DigitSource for ZeroBlockSource {
    fn next_digit(&mut self) -> Option<Digit> {
        self.pos += 1;
        Some(if self.layout.is_zero(self.pos) {
            Digit::Zero
        } else {
            Digit::One
        })
    }
}

/// Zeros on `2^k + 1 ..= 2^k + floor(2^(k delta))` with `delta = (gamma + 1)/2`,
/// ones elsewhere.
pub fn infinity_stream(gamma: f64) -> Result<DigitStream> {
    let layout = ZeroBlockLayout::new(gamma)?;
    Ok(DigitStream::from_source(
        StreamKind::ZeroBlocks,
        Box::new(ZeroBlockSource { layout, pos: 0 }),
    ))
}

struct ForcedOnesSource {
    m: u64,
    pos: u64,
    coins: UniformSource,
}

impl DigitSource for ForcedOnesSource {
    fn next_digit(&mut self) -> Option<Digit> {
        self.pos += 1;
        if self.pos.is_multiple_of(self.m) {
            Some(Digit::One)
        } else {
            Some(Digit::from_bit(self.coins.next_bit()))
        }
    }
}

/// A random point of `F_m`: digit `k m` is `1` for every `k`, the rest fair coins.
pub fn f_m_stream(m: usize, seed: u64) -> Result<DigitStream> {
    if m < 2 {
        return Err(Error::MBelowTwo(m));
    }
    Ok(DigitStream::from_source(
        StreamKind::ForcedOnes,
        Box::new(ForcedOnesSource {
            m: m as u64,
            pos: 0,
            coins: UniformSource::new(seed),
        }),
    ))
}

/// `S_N / (beta Psi(N))` at a checkpoint as a float (through `log2`).
pub fn checkpoint_ratio(sum: &BigUint, schedule: &CantorSchedule, n: u64) -> f64 {
    let target = schedule.psi.scaled_round(schedule.beta, n);
    match (sum.to_f64(), target.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b > 0.0 => a / b,
        _ => (log2_big(sum) - log2_big(&target)).exp2(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::birkhoff_phi_trace;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn aligned_examples() {
        let a = aligned_value(&big(5), 1).unwrap();
        assert_eq!((a.v.clone(), a.ones, a.trailing_zeros), (big(6), 2, 1));
        let a = aligned_value(&big(7), 0).unwrap();
        assert_eq!((a.v.clone(), a.ones, a.trailing_zeros), (big(8), 1, 3));
        for t in 0..10 {
            for n in 0..=t {
                assert_eq!(aligned_value(&big(1 << t), n).unwrap().v, big(1 << t));
            }
        }
        assert_eq!(aligned_value(&big(5), 3), Err(Error::NExceedsT { n: 3, t: 2 }));
    }

    #[test]
    fn aligned_is_minimal_multiple() {
        for w in 1u64..(1 << 16) {
            let t = 63 - w.leading_zeros();
            for n in 0..=t {
                let a = aligned_value(&big(w), n).unwrap();
                let unit = 1u64 << (t - n);
                let v = a.v.to_u64().unwrap();
                assert_eq!(v % unit, 0);
                assert!(v >= w && v - unit < w);
                assert!((1u64 << n) * v <= (1u64 << n) * w + w);
                assert!(a.ones <= n as u64 + 2);
            }
        }
    }

    #[test]
    fn approx_word_examples() {
        let w = approx_word(&big(5), 1).unwrap();
        assert_eq!(w.word.to_string(), "10111");
        assert_eq!(w.exponents, vec![2, 1]);
        assert_eq!(birkhoff_phi_sum(w.word.iter(), 5).unwrap(), big(6));
        // V = 9 = 2^3 + 2^0: W = 9 with n = 3 keeps V = W
        let w = approx_word(&big(9), 3).unwrap();
        assert_eq!(w.word.to_string(), "10011");
        let trace = birkhoff_phi_trace(w.word.iter(), 5).unwrap();
        assert_eq!(trace.values, [1u64, 5, 7, 8, 9].map(big).to_vec());
        let w = approx_word(&big(32), 5).unwrap();
        assert_eq!(w.word.to_string(), "100001");
    }

    #[test]
    fn g_word_example() {
        let w = approx_word_g(&big(4), 0, 2).unwrap();
        assert_eq!(w.word.to_string(), "10111");
        let sum = g_word_sum(&w).unwrap();
        let window = g_sum_window(&big(4), 0, 2);
        assert_eq!(window.upper, BigRational::from_integer(BigInt::from(18)));
        assert!(sum.is_subset_of(&window), "{sum:?}");
        let plain = approx_word_g(&big(5), 1, 0).unwrap();
        assert_eq!(plain.word, approx_word(&big(5), 1).unwrap().word);
    }

    #[test]
    fn f_m_forces_lattice() {
        let word = f_m_stream(2, 9).unwrap().take_word(1000);
        assert!(word.digits().iter().skip(1).step_by(2).all(|d| d.is_one()));
        let again = f_m_stream(2, 9).unwrap().take_word(1000);
        assert_eq!(word, again);
        assert_eq!(f_m_stream(1, 0).unwrap_err(), Error::MBelowTwo(1));
    }

    #[test]
    fn infinity_layout() {
        let layout = ZeroBlockLayout::new(0.6).unwrap();
        assert_eq!(layout.delta, 0.8);
        assert_eq!(layout.k_start, 1);
        let word = infinity_stream(0.6).unwrap().take_word(5000);
        for k in 1..12 {
            let (a, b) = layout.block_range(k);
            for p in a..=b {
                assert_eq!(word.digits()[p as usize - 1], Digit::Zero);
            }
            assert_eq!(word.digits()[b as usize], Digit::One);
        }
        let zeros = word.len() - word.count_ones();
        assert_eq!(zeros as u64, layout.constrained_count(5000));
        assert!(ZeroBlockLayout::new(0.4).is_err());
        assert!(ZeroBlockLayout::new(1.0).is_err());
    }

    #[test]
    fn schedule_rules() {
        assert!(matches!(
            CantorSchedule::new(GrowthFunction::DoubleExp(0.6), 1.0, 16),
            Err(Error::RegimeMismatch { .. })
        ));
        let s = CantorSchedule::new(GrowthFunction::DoubleExp(0.4), 1.0, 8).unwrap();
        let d = s.delta.unwrap();
        assert!(0.4 / 0.6 + d * 0.4 < 1.0);
        let s = CantorSchedule::new(GrowthFunction::Power(2.0), 1.0, 16).unwrap();
        assert_eq!(s.checkpoint(7), 49);
        for k in 1..400 {
            let level = s.level(k).unwrap();
            let gap = level.n_k - level.n_prev;
            if level.feasible {
                assert_eq!(gap - level.word_len, level.fillers * 16 + level.ones);
                assert!(level.ones < 16);
            }
            assert!(level.precision as f64 <= log2_big(&level.w));
        }
    }

    #[test]
    fn structural_ones_at_filler_ends() {
        let s = CantorSchedule::new(GrowthFunction::Power(2.0), 1.0, 16).unwrap();
        let k0 = s.first_feasible().unwrap();
        let word = cantor_stream(GrowthFunction::Power(2.0), 1.0, 16, Filler::Seeded, 4)
            .unwrap()
            .take_word(s.checkpoint(k0 + 40) as usize);
        for k in k0..k0 + 40 {
            let level = s.level(k).unwrap();
            for t in 1..=level.fillers {
                let pos = level.n_prev + t * 16;
                assert!(word.digits()[pos as usize - 1].is_one());
            }
        }
        assert!(word.digits()[..s.checkpoint(k0 - 1) as usize].iter().all(|d| d.is_one()));
    }

    #[test]
    fn level_sums_are_exact() {
        let s = CantorSchedule::new(GrowthFunction::NLogN, 2.0, 8).unwrap();
        let k0 = s.first_feasible().unwrap();
        let n = s.checkpoint(k0 + 10);
        let word = stream_from_schedule(s.clone(), Filler::Deterministic, 0)
            .unwrap()
            .take_word(n as usize);
        let trace = birkhoff_phi_trace(word.iter(), n as usize).unwrap();
        let filler_sum = big((1 << 8) - 1);
        for k in k0 + 1..=k0 + 10 {
            let level = s.level(k).unwrap();
            let expected = trace.at(level.n_prev as usize)
                + &filler_sum * level.fillers
                + level.ones
                + &level.word_sum;
            assert_eq!(trace.at(level.n_k as usize), &expected);
        }
    }
}
