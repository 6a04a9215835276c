//! Exact symbolic dynamics of the doubling map.
//!
//! A point of `(0, 1]` is only ever handled through its binary digits: the
//! doubling map is the left shift, the Saint-Petersburg potential reads the
//! leading zero run, and every Birkhoff sum is an exact big integer. No
//! floating-point orbit is iterated anywhere in the crate.
//!
//! Cylinders are half-open, `(lo, lo + 2^-n]`, matching the domain `(0, 1]`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Digit {
    Zero,
    One,
}

impl Digit {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Digit::One
        } else {
            Digit::Zero
        }
    }

    pub fn is_one(self) -> bool {
        self == Digit::One
    }

    pub fn as_char(self) -> char {
        match self {
            Digit::Zero => '0',
            Digit::One => '1',
        }
    }
}

/// A finite binary word, the label of a dyadic cylinder.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BinaryWord(Vec<Digit>);

impl BinaryWord {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_digits(digits: Vec<Digit>) -> Self {
        Self(digits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Digit::Zero; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![Digit::One; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, Digit>> {
        self.0.iter().copied()
    }

    pub fn push(&mut self, d: Digit) {
        self.0.push(d);
    }

    pub fn extend_from(&mut self, other: &BinaryWord) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|d| d.is_one()).count()
    }

    /// The word read as a binary integer, most significant digit first.
    pub fn to_biguint(&self) -> BigUint {
        let mut bytes = Vec::with_capacity(self.len().div_ceil(8));
        let mut acc = 0u8;
        let pad = (8 - self.len() % 8) % 8;
        for (i, d) in std::iter::repeat_n(Digit::Zero, pad)
            .chain(self.iter())
            .enumerate()
        {
            acc = (acc << 1) | d.is_one() as u8;
            if i % 8 == 7 {
                bytes.push(acc);
                acc = 0;
            }
        }
        BigUint::from_bytes_be(&bytes)
    }

    /// The T-dyadic cylinder `I_n(w)`.
    pub fn cylinder(&self) -> DyadicInterval {
        let lower = self.to_biguint();
        let upper = &lower + 1u32;
        DyadicInterval {
            lower_num: lower,
            upper_num: upper,
            exponent: self.len() as u64,
        }
    }

    /// Serialized form used by digit files: one ASCII line, newline-terminated.
    pub fn to_line(&self) -> String {
        let mut s = self.to_string();
        s.push('\n');
        s
    }

    /// Parses a digit-file line. A single trailing `\n` is accepted; any other
    /// character, including whitespace, is rejected.
    pub fn parse_line(line: &str) -> Result<Self> {
        let body = line.strip_suffix('\n').unwrap_or(line);
        body.parse()
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(Digit::Zero),
                '1' => Ok(Digit::One),
                other => Err(Error::Parse(format!(
                    "invalid digit {other:?} at column {}",
                    i + 1
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BinaryWord)
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|d| d.as_char()).collect();
        f.write_str(&s)
    }
}

impl serde::Serialize for BinaryWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BinaryWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromIterator<Digit> for BinaryWord {
    fn from_iter<I: IntoIterator<Item = Digit>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Half-open dyadic interval `(lower_num / 2^exponent, upper_num / 2^exponent]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicInterval {
    pub lower_num: BigUint,
    pub upper_num: BigUint,
    pub exponent: u64,
}

impl DyadicInterval {
    pub fn lower(&self) -> BigRational {
        dyadic_rational(&self.lower_num, self.exponent)
    }

    pub fn upper(&self) -> BigRational {
        dyadic_rational(&self.upper_num, self.exponent)
    }

    /// `-log2` of the interval length.
    pub fn length_exponent(&self) -> u64 {
        // upper - lower is a power of two for every cylinder we construct
        let width = &self.upper_num - &self.lower_num;
        self.exponent - (width.bits() - 1)
    }
}

fn dyadic_rational(num: &BigUint, exponent: u64) -> BigRational {
    BigRational::new(
        BigInt::from(num.clone()),
        BigInt::from(BigUint::one() << exponent),
    )
}

/// Closed interval with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl RationalInterval {
    pub fn new(lower: BigRational, upper: BigRational) -> Self {
        debug_assert!(lower <= upper);
        Self { lower, upper }
    }

    pub fn point(x: BigRational) -> Self {
        Self {
            lower: x.clone(),
            upper: x,
        }
    }

    pub fn add(&self, other: &RationalInterval) -> RationalInterval {
        RationalInterval {
            lower: &self.lower + &other.lower,
            upper: &self.upper + &other.upper,
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn is_subset_of(&self, other: &RationalInterval) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }

    /// Floating-point enclosure, each endpoint widened by one ulp.
    pub fn to_f64_outward(&self) -> (f64, f64) {
        let lo = self.lower.to_f64().unwrap_or(f64::NEG_INFINITY);
        let hi = self.upper.to_f64().unwrap_or(f64::INFINITY);
        (lo.next_down(), hi.next_up())
    }
}

/// Value of the potential on a prefix: `2^n` when the prefix begins `0^n 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiPrefix {
    Determined { hitting_time: usize },
    NeedsMoreDigits,
}

impl PhiPrefix {
    pub fn value(&self) -> Option<BigUint> {
        match self {
            PhiPrefix::Determined { hitting_time } => Some(BigUint::one() << *hitting_time),
            PhiPrefix::NeedsMoreDigits => None,
        }
    }
}

pub fn phi_prefix(prefix: &[Digit]) -> PhiPrefix {
    match prefix.iter().position(|d| d.is_one()) {
        Some(n) => PhiPrefix::Determined { hitting_time: n },
        None => PhiPrefix::NeedsMoreDigits,
    }
}

/// Return-time blocks `(n_1, ..., n_l)` of a digit prefix; block `k` is the
/// pattern `0^(n_k - 1) 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub blocks: Vec<u64>,
    pub remainder: BinaryWord,
}

impl BlockDecomposition {
    pub fn from_blocks(blocks: Vec<u64>) -> Self {
        assert!(blocks.iter().all(|&b| b >= 1), "blocks must be >= 1");
        Self {
            blocks,
            remainder: BinaryWord::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Total length `n_1 + ... + n_l` of the complete blocks.
    pub fn block_length(&self) -> u64 {
        self.blocks.iter().sum()
    }

    pub fn digits(&self) -> impl Iterator<Item = Digit> + '_ {
        self.blocks
            .iter()
            .flat_map(|&n| {
                std::iter::repeat_n(Digit::Zero, (n - 1) as usize).chain(std::iter::once(Digit::One))
            })
            .chain(self.remainder.iter())
    }

    pub fn render(&self) -> BinaryWord {
        self.digits().collect()
    }

    /// The accelerated cylinder `D_l(n_1, ..., n_l)`, which is the T-cylinder
    /// of the rendered complete blocks.
    pub fn accelerated_cylinder(&self) -> DyadicInterval {
        let word: BinaryWord = BlockDecomposition::from_blocks(self.blocks.clone())
            .digits()
            .collect();
        word.cylinder()
    }
}

pub fn return_blocks(prefix: &[Digit]) -> BlockDecomposition {
    let mut blocks = Vec::new();
    let mut run = 0u64;
    for d in prefix {
        run += 1;
        if d.is_one() {
            blocks.push(run);
            run = 0;
        }
    }
    BlockDecomposition {
        blocks,
        remainder: BinaryWord::zeros(run as usize),
    }
}

/// A complete block as seen by a [`BlockWalker`]: digit positions
/// `start..=end` (1-based) hold `0^(len - 1) 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkedBlock {
    pub start: usize,
    pub end: usize,
    pub len: u64,
}

/// Consumes digits block by block while tracking the exact Birkhoff sum at
/// block boundaries.
pub struct BlockWalker<I> {
    digits: I,
    consumed: usize,
    sum: BigUint,
    blocks: u64,
}

impl<I: Iterator<Item = Digit>> BlockWalker<I> {
    pub fn new<J: IntoIterator<IntoIter = I>>(digits: J) -> Self {
        Self {
            digits: digits.into_iter(),
            consumed: 0,
            sum: BigUint::zero(),
            blocks: 0,
        }
    }

    /// Number of digits read so far.
    pub fn consumed(&self) -> usize {
        self.consumed
    }

    /// Birkhoff sum at the last completed block boundary.
    pub fn sum(&self) -> &BigUint {
        &self.sum
    }

    pub fn blocks_seen(&self) -> u64 {
        self.blocks
    }

    /// Reads the next block. `None` when the source ends before a `1`.
    pub fn next_block(&mut self) -> Option<WalkedBlock> {
        let start = self.consumed + 1;
        loop {
            let d = self.digits.next()?;
            self.consumed += 1;
            if d.is_one() {
                break;
            }
        }
        let end = self.consumed;
        let len = (end + 1 - start) as u64;
        if len <= 63 {
            self.sum += (1u64 << len) - 1;
        } else {
            self.sum += (BigUint::one() << len) - 1u32;
        }
        self.blocks += 1;
        Some(WalkedBlock { start, end, len })
    }

    /// `S_p` for `start - 1 <= p <= end` of the block just read: inside a
    /// block the potential takes the values `2^(end - i)`, so
    /// `S_end - S_p = 2^(end - p) - 1`.
    pub fn sum_at(&self, block: &WalkedBlock, p: usize) -> BigUint {
        assert!(p + 1 >= block.start && p <= block.end);
        (&self.sum + 1u32) - (BigUint::one() << (block.end - p))
    }
}

/// Exact trace `S_1, ..., S_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigSumTrace {
    pub values: Vec<BigUint>,
}

impl BigSumTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `S_n` for 1-based `n`.
    pub fn at(&self, n: usize) -> &BigUint {
        &self.values[n - 1]
    }

    pub fn last(&self) -> Option<&BigUint> {
        self.values.last()
    }
}

/// `S_1, ..., S_N` of the potential along the orbit of the point whose
/// digits are produced by `digits`. Reads up to the first `1` at or after
/// position `N`.
pub fn birkhoff_phi_trace<I>(digits: I, n: usize) -> Result<BigSumTrace>
where
    I: IntoIterator<Item = Digit>,
{
    let mut walker = BlockWalker::new(digits);
    let mut values = Vec::with_capacity(n);
    while values.len() < n {
        let block = walker.next_block().ok_or(Error::InsufficientDigits {
            position: walker.consumed() + 1,
        })?;
        let stop = block.end.min(n);
        for p in block.start..=stop {
            values.push(walker.sum_at(&block, p));
        }
    }
    Ok(BigSumTrace { values })
}

/// `S_N` alone, without materializing the trace.
pub fn birkhoff_phi_sum<I>(digits: I, n: usize) -> Result<BigUint>
where
    I: IntoIterator<Item = Digit>,
{
    let mut walker = BlockWalker::new(digits);
    if n == 0 {
        return Ok(BigUint::zero());
    }
    loop {
        let block = walker.next_block().ok_or(Error::InsufficientDigits {
            position: walker.consumed() + 1,
        })?;
        if block.end >= n {
            return Ok(walker.sum_at(&block, n));
        }
    }
}

/// `S_p` at each of the strictly increasing `positions`.
pub fn birkhoff_phi_at<I>(digits: I, positions: &[usize]) -> Result<Vec<BigUint>>
where
    I: IntoIterator<Item = Digit>,
{
    let mut walker = BlockWalker::new(digits);
    let mut out = Vec::with_capacity(positions.len());
    let mut pending = positions.iter().peekable();
    while let Some(&&p) = pending.peek() {
        if p == 0 {
            out.push(BigUint::zero());
            pending.next();
            continue;
        }
        let block = walker.next_block().ok_or(Error::InsufficientDigits {
            position: walker.consumed() + 1,
        })?;
        while let Some(&&p) = pending.peek() {
            if p > block.end {
                break;
            }
            out.push(walker.sum_at(&block, p));
            pending.next();
        }
    }
    Ok(out)
}

/// Accelerated sums `S^_l = sum 2^(n_k - 1)` and induced-potential sums
/// `sum (2^(n_k) - 1)` for every prefix of the block sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceleratedSums {
    pub hat: Vec<BigUint>,
    pub induced: Vec<BigUint>,
}

pub fn accelerated_sums(blocks: &BlockDecomposition) -> Result<AcceleratedSums> {
    if blocks.is_empty() {
        return Err(Error::EmptyDecomposition);
    }
    let mut hat = Vec::with_capacity(blocks.len());
    let mut induced = Vec::with_capacity(blocks.len());
    let mut h = BigUint::zero();
    let mut s = BigUint::zero();
    for &n in &blocks.blocks {
        let pow = BigUint::one() << n;
        h += &pow >> 1u32;
        s += pow - 1u32;
        hat.push(h.clone());
        induced.push(s.clone());
    }
    Ok(AcceleratedSums { hat, induced })
}

/// Interval enclosures of the Birkhoff sums of `g(x) = 1/x` over the whole
/// cylinder of `prefix`: entry `j` encloses `g(x) + ... + g(T^j x)`.
///
/// The term `g(T^j x)` ranges over `1/x'` with `x'` in the cylinder of the
/// suffix starting at digit `j + 1`, so it lies in `[1/upper, 1/lower]`.
pub fn birkhoff_g_interval_trace(prefix: &BinaryWord, n: usize) -> Result<Vec<RationalInterval>> {
    let len = prefix.len();
    if n > len {
        return Err(Error::InsufficientDigits { position: len + 1 });
    }
    let value = prefix.to_biguint();
    let mut out = Vec::with_capacity(n);
    let mut acc = RationalInterval::point(BigRational::zero());
    for j in 0..n {
        let m = (len - j) as u64;
        let modulus = BigUint::one() << m;
        let suffix = &value % &modulus;
        if suffix.is_zero() {
            return Err(Error::InsufficientDigits { position: j + 1 });
        }
        let scale = BigInt::from(modulus);
        let lo = BigRational::new(scale.clone(), BigInt::from(&suffix + 1u32));
        let hi = BigRational::new(scale, BigInt::from(suffix));
        acc = acc.add(&RationalInterval::new(lo, hi));
        out.push(acc.clone());
    }
    Ok(out)
}

/// `log2 x` computed from the bit length and the top 64 bits.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits in u64") as f64).log2();
    }
    let shift = bits - 64;
    let top: u64 = (x >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

// ---------------------------------------------------------------------------
// Digit streams

/// Producer of digits at positions 1, 2, ...; `None` marks the end of a finite
/// prefix.
pub trait DigitSource: Send {
    fn next_digit(&mut self) -> Option<Digit>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    UniformRandom,
    GibbsSampled,
    CantorConstructed,
    Periodic,
    ExplicitPrefix,
    /// Zero blocks at dyadic positions, ones elsewhere.
    ZeroBlocks,
    /// Forced ones on a lattice of positions, fair coins elsewhere.
    ForcedOnes,
}

/// A point of `(0, 1]` as a lazy digit source.
pub struct DigitStream {
    kind: StreamKind,
    source: Box<dyn DigitSource>,
    position: usize,
}

impl fmt::Debug for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DigitStream")
            .field("kind", &self.kind)
            .field("position", &self.position)
            .finish()
    }
}

impl DigitStream {
    pub fn from_source(kind: StreamKind, source: Box<dyn DigitSource>) -> Self {
        Self {
            kind,
            source,
            position: 0,
        }
    }

    /// Fair-coin digits from a seeded generator, 64 digits per draw, most
    /// significant bit first.
    pub fn uniform(seed: u64) -> Self {
        Self::from_source(StreamKind::UniformRandom, Box::new(UniformSource::new(seed)))
    }

    /// The eventually periodic point `word word word ...`. The word must
    /// contain a `1`.
    pub fn periodic(word: BinaryWord) -> Self {
        assert!(word.count_ones() > 0, "periodic word needs a 1");
        Self::from_source(
            StreamKind::Periodic,
            Box::new(PeriodicSource { word, index: 0 }),
        )
    }

    pub fn all_ones() -> Self {
        Self::periodic(BinaryWord::ones(1))
    }

    /// A finite prefix; the stream ends after its last digit.
    pub fn explicit(word: BinaryWord) -> Self {
        Self::from_source(
            StreamKind::ExplicitPrefix,
            Box::new(ExplicitSource { word, index: 0 }),
        )
    }

    pub fn kind(&self) -> StreamKind {
        self.kind
    }

    /// Digits emitted so far.
    pub fn position(&self) -> usize {
        self.position
    }

    /// Up to `n` further digits (fewer if a finite prefix runs out).
    pub fn take_word(&mut self, n: usize) -> BinaryWord {
        self.by_ref().take(n).collect()
    }
}

impl Iterator for DigitStream {
    type Item = Digit;

    fn next(&mut self) -> Option<Digit> {
        let d = self.source.next_digit()?;
        self.position += 1;
        Some(d)
    }
}

pub(crate) struct UniformSource {
    rng: ChaCha8Rng,
    buffer: u64,
    left: u32,
}

impl UniformSource {
    pub(crate) fn new(seed: u64) -> Self {
        Self {
            rng: rng_from_seed(seed),
            buffer: 0,
            left: 0,
        }
    }

    pub(crate) fn next_bit(&mut self) -> bool {
        if self.left == 0 {
            self.buffer = self.rng.next_u64();
            self.left = 64;
        }
        self.left -= 1;
        (self.buffer >> self.left) & 1 == 1
    }
}

impl DigitSource for UniformSource {
    fn next_digit(&mut self) -> Option<Digit> {
        Some(Digit::from_bit(self.next_bit()))
    }
}

struct PeriodicSource {
    word: BinaryWord,
    index: usize,
}

impl DigitSource for PeriodicSource {
    fn next_digit(&mut self) -> Option<Digit> {
        let d = self.word.digits()[self.index];
        self.index = (self.index + 1) % self.word.len();
        Some(d)
    }
}

struct ExplicitSource {
    word: BinaryWord,
    index: usize,
}

impl DigitSource for ExplicitSource {
    fn next_digit(&mut self) -> Option<Digit> {
        let d = self.word.digits().get(self.index).copied()?;
        self.index += 1;
        Some(d)
    }
}
