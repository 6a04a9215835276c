//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with its
//! wall time straight to stderr, so the lines survive output capture.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use stpetersburg::constructions::{aligned_value, approx_word, cantor_stream, f_m_stream, Filler};
use stpetersburg::dyadic::{
    accelerated_sums, birkhoff_g_interval_trace, birkhoff_phi_at, birkhoff_phi_sum, birkhoff_phi_trace, return_blocks,
    BinaryWord, Digit, DigitStream,
};
use stpetersburg::experiments::{entropy_dim_estimate, weak_law, SourceSpec, StreamFactory};
use stpetersburg::gibbs::{build_distribution, gibbs_statistics};
use stpetersburg::growth::{classify, BetaClass, GrowthFunction, Potential, Verdict};
use stpetersburg::pressure::{solve_t, SOLVER_TOL};
use stpetersburg::rng::derive_seed;
use stpetersburg::spectrum::{dim_at_alpha, spectrum_curve};

const SEED: u64 = 0x5eed_2024;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs `body`, enforces the wall-time budget, reports, and panics on failure.
fn criterion(id: &str, name: &str, budget: Duration, body: impl FnOnce() -> Check) {
    let start = Instant::now();
    let mut result = body();
    let elapsed = start.elapsed();
    if result.is_ok() && elapsed > budget {
        result = Err(format!("took {elapsed:.2?}, budget {budget:?}"));
    }
    let line = match &result {
        Ok(()) => format!("PASS criterion {id}: {name} ({elapsed:.2?})\n"),
        Err(e) => format!("FAIL criterion {id}: {name} ({elapsed:.2?}): {e}\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(e) = result {
        panic!("criterion {id} failed: {e}");
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const Q_GRID: [f64; 5] = [1e-4, 1e-2, 1.0, 10.0, 100.0];

#[test]
fn criterion_01_pressure_normalization() {
    criterion("1", "pressure normalization", secs(1), || {
        for q in Q_GRID {
            let t = solve_t(q, SOLVER_TOL).map_err(|e| e.to_string())?.t_of_q;
            // summed here term by term, independent of the solver's series code
            let mut sum = 0.0f64;
            for n in 1..=4096u32 {
                let nf = n as f64;
                let term = (-t * nf - q * (nf.exp2() - 1.0)).exp2();
                sum += term;
                if term < 1e-30 && n > 8 {
                    break;
                }
            }
            ensure((sum - 1.0).abs() < 1e-12, || format!("q = {q}: sum = {sum:.17}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_02a_boundary_asymptotics_large_q() {
    criterion("2a", "boundary asymptotics |t(10) + 10| < 1e-3", secs(1), || {
        let sol = solve_t(10.0, SOLVER_TOL).map_err(|e| e.to_string())?;
        ensure(sol.floor_gap.abs() < 1e-3, || {
            format!("t(10) + 10 = {:.6e}", sol.floor_gap)
        })
    });
}

#[test]
fn criterion_02b_boundary_asymptotics_small_q_and_slope() {
    criterion("2b", "t(1e-6) in (0.9, 1) and t' against central differences", secs(1), || {
        let t = solve_t(1e-6, SOLVER_TOL).map_err(|e| e.to_string())?.t_of_q;
        ensure(t > 0.9 && t < 1.0, || format!("t(1e-6) = {t}"))?;
        for q in Q_GRID {
            let sol = solve_t(q, SOLVER_TOL).map_err(|e| e.to_string())?;
            let h = q * 1e-5;
            let up = solve_t(q + h, SOLVER_TOL).map_err(|e| e.to_string())?.t_of_q;
            let down = solve_t(q - h, SOLVER_TOL).map_err(|e| e.to_string())?.t_of_q;
            let fd = (up - down) / (2.0 * h);
            ensure((fd - sol.t_prime).abs() < 1e-5, || {
                format!("q = {q}: t' = {}, central difference {fd}", sol.t_prime)
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_03_spectrum_shape() {
    criterion("3", "spectrum shape on 200 points in [1, 100]", secs(10), || {
        let rows = spectrum_curve(1.0, 100.0, 200, 1e-15).map_err(|e| e.to_string())?;
        ensure(rows.len() == 200, || format!("{} rows", rows.len()))?;
        let d: Vec<f64> = rows.iter().map(|r| r.dimension).collect();
        ensure(d[0] == 0.0, || format!("dim(1) = {}", d[0]))?;
        for (i, w) in d.windows(2).enumerate() {
            ensure(w[1] >= w[0], || format!("decrease at row {i}: {} -> {}", w[0], w[1]))?;
        }
        for (i, w) in d.windows(3).enumerate() {
            let second = w[2] - 2.0 * w[1] + w[0];
            ensure(second <= 1e-9, || format!("convexity at row {}: {second:e}", i + 1))?;
        }
        let far = dim_at_alpha(1e4, 1e-15).map_err(|e| e.to_string())?.dimension;
        ensure(far > 0.99, || format!("dim(1e4) = {far}"))
    });
}

#[test]
fn criterion_04_legendre_envelope() {
    criterion("4", "Legendre envelope on a 50x50 grid", secs(10), || {
        let alphas: Vec<f64> = (0..50).map(|i| 1.0 + 99.0 * i as f64 / 49.0).collect();
        let qs: Vec<f64> = (0..50).map(|i| 10f64.powf(-4.0 + 6.0 * i as f64 / 49.0)).collect();
        let ts: Vec<f64> = qs
            .iter()
            .map(|&q| solve_t(q, SOLVER_TOL).map(|s| s.t_of_q))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for &alpha in &alphas {
            let dim = dim_at_alpha(alpha, 1e-15).map_err(|e| e.to_string())?.dimension;
            for (&q, &t) in qs.iter().zip(&ts) {
                ensure(dim <= t + q * alpha + 1e-10, || {
                    format!("alpha = {alpha}, q = {q}: dim {dim} > {}", t + q * alpha)
                })?;
            }
        }
        Ok(())
    });
}

/// `S_len` of a word ending in 1, by evaluating `phi` at every orbit point.
fn orbit_sum(word: &BinaryWord) -> BigUint {
    let d = word.digits();
    let mut s = BigUint::zero();
    for i in 0..d.len() {
        let zeros = d[i..].iter().position(|x| x.is_one()).expect("word ends in 1");
        s += BigUint::one() << zeros;
    }
    s
}

#[test]
fn criterion_05_exact_combinatorics() {
    criterion("5", "aligned_value / approx_word exhaustive for W < 2^12", secs(30), || {
        for w in 1u64..(1 << 12) {
            let wb = BigUint::from(w);
            let t = 63 - w.leading_zeros();
            for n in 0..=t {
                let a = aligned_value(&wb, n).map_err(|e| e.to_string())?;
                let v = a.v.to_u64().unwrap();
                let ctx = || format!("W = {w}, n = {n}, V = {v}");
                // W <= V <= W (1 + 2^-n), i.e. 2^n V <= (2^n + 1) W
                ensure(v >= w && (v << n) <= ((1u64 << n) + 1) * w, || format!("{}: window", ctx()))?;
                ensure(v.count_ones() as u64 <= n as u64 + 2, || format!("{}: ones", ctx()))?;
                ensure(v.trailing_zeros() >= t - n, || format!("{}: trailing zeros", ctx()))?;
                ensure(a.ones == v.count_ones() as u64, || format!("{}: reported ones", ctx()))?;
                let word = approx_word(&wb, n).map_err(|e| e.to_string())?;
                let bound = (n as f64 + 2.0) * (2.0 + (w as f64).log2());
                ensure(word.word.len() as f64 <= bound, || {
                    format!("{}: length {} > {bound}", ctx(), word.word.len())
                })?;
                ensure(orbit_sum(&word.word) == a.v, || format!("{}: orbit sum", ctx()))?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_06_transference_identity() {
    criterion("6", "transference identity on 10^4 streams", secs(10), || {
        for i in 0..10_000u64 {
            let ell = 1 + (derive_seed(SEED, i) % 1000) as usize;
            let mut stream = DigitStream::uniform(derive_seed(SEED ^ 0xabcd, i));
            let mut prefix = Vec::new();
            let mut ones = 0;
            while ones < ell {
                let d = stream.next().unwrap();
                ones += d.is_one() as usize;
                prefix.push(d);
            }
            let blocks = return_blocks(&prefix);
            ensure(blocks.len() == ell, || format!("stream {i}: {} blocks", blocks.len()))?;
            let hat = accelerated_sums(&blocks).map_err(|e| e.to_string())?.hat[ell - 1].clone();
            let s = birkhoff_phi_sum(prefix.iter().copied(), prefix.len()).map_err(|e| e.to_string())?;
            ensure(BigInt::from(s.clone()) == BigInt::from(hat) * 2 - ell, || {
                format!("stream {i}, ell = {ell}: S = {s}")
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_07_gibbs_consistency() {
    criterion("7", "Gibbs consistency at q = 0.5, 1, 2", secs(60), || {
        for q in [0.5, 1.0, 2.0] {
            let sol = solve_t(q, SOLVER_TOL).map_err(|e| e.to_string())?;
            let alpha = -sol.t_prime;
            let dist = build_distribution(q, 1e-16).map_err(|e| e.to_string())?;
            let s = gibbs_statistics(&dist, 10_000, 100, SEED).map_err(|e| e.to_string())?;
            ensure((s.alpha_hat - alpha).abs() <= 3.0 * s.alpha_se, || {
                format!("q = {q}: alpha_hat {} vs {alpha}, se {}", s.alpha_hat, s.alpha_se)
            })?;
            let target = sol.t_of_q + q * alpha;
            ensure(((s.localdim_hat - target) / target).abs() <= 0.02, || {
                format!("q = {q}: localdim {} vs {target}", s.localdim_hat)
            })?;
        }
        Ok(())
    });
}

/// `S_(k^2)` for `k = 312..=316` of the seeded construction below.
const CANTOR_GOLDEN: [(u64, u64); 5] = [
    (97_344, 9_750_175_772),
    (97_969, 9_876_010_622),
    (98_596, 10_001_841_214),
    (99_225, 10_127_672_190),
    (99_856, 10_253_504_489),
];

#[test]
fn criterion_08_constructed_level_set_point() {
    criterion("8", "cantor_stream(n^2, 1, m = 16) golden trace", secs(30), || {
        let psi = GrowthFunction::power(2.0).map_err(|e| e.to_string())?;
        let mut stream = cantor_stream(psi, 1.0, 16, Filler::Seeded, 2024).map_err(|e| e.to_string())?;
        let prefix = stream.take_word(100_000);
        // the last checkpoint's sum needs no digit beyond the prefix
        let positions: Vec<usize> = (1..=316u64).map(|k| (k * k) as usize).collect();
        ensure(prefix.digits()[99_855].is_one(), || "digit N_316 is not a 1".into())?;
        let sums = birkhoff_phi_at(prefix.iter(), &positions).map_err(|e| e.to_string())?;
        let tail = &sums[sums.len() - 5..];
        for ((n, golden), s) in CANTOR_GOLDEN.iter().zip(tail) {
            ensure(*s == BigUint::from(*golden), || format!("S_{n} = {s}, golden {golden}"))?;
            let ratio = s.to_f64().unwrap() / (*n as f64).powi(2);
            ensure((0.8..=1.2).contains(&ratio), || format!("S_{n} / n^2 = {ratio}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_09_regime_table() {
    criterion("9", "regime table, 18 cases", secs(1), || {
        use BetaClass::*;
        use Verdict::*;
        let table = [
            ("n^2", [FullDimension, FullDimension, FullDimension]),
            ("2^n^0.6", [FullDimension, Empty, FullDimension]),
            ("2^n^1.5", [FullDimension, Empty, Empty]),
        ];
        // other members of each regime must agree with its representative
        let aliases = [("nlogn", 0), ("n^1.5", 0), ("2^n^0.3", 0), ("2^n^0.5", 1), ("2^n^0.9", 1), ("2^n^1", 2)];
        let parse = |spec: &str| spec.parse::<GrowthFunction>().map_err(|e| e.to_string());
        let mut cases = 0;
        for (spec, verdicts) in table {
            let psi = parse(spec)?;
            for (class, expected) in [Zero, FinitePositive, Infinity].into_iter().zip(verdicts) {
                for potential in [Potential::Phi, Potential::G] {
                    let v = classify(&psi, class, potential);
                    ensure(v.verdict == expected && !v.citation.is_empty(), || {
                        format!("{spec}, {class}, {potential}: {}", v.verdict)
                    })?;
                    cases += 1;
                }
            }
        }
        for (spec, row) in aliases {
            let psi = parse(spec)?;
            let rep = parse(table[row].0)?;
            for class in [Zero, FinitePositive, Infinity] {
                for potential in [Potential::Phi, Potential::G] {
                    let (a, b) = (classify(&psi, class, potential), classify(&rep, class, potential));
                    ensure(a == b, || format!("{spec} disagrees with {} at {class}, {potential}", table[row].0))?;
                }
            }
        }
        ensure(cases == 18, || format!("{cases} cases"))
    });
}

#[test]
fn criterion_10_weak_law() {
    criterion("10", "weak law median at n = 2^16 in [1.08, 1.80]", secs(60), || {
        let report = weak_law(1 << 16, 2000, SEED).map_err(|e| e.to_string())?;
        let median = report.median();
        ensure((1.08..=1.80).contains(&median), || {
            format!("median S_n / (n ln n) = {median:.4}")
        })
    });
}

#[test]
fn criterion_11_g_potential_bounds() {
    criterion("11", "g-potential bounds", secs(10), || {
        for i in 0..1000u64 {
            let len = 16 + (derive_seed(SEED, i) % 49) as usize;
            let mut word = DigitStream::uniform(derive_seed(SEED ^ 0x6, i)).take_word(len);
            word.push(Digit::One);
            let n = word.len();
            let g = birkhoff_g_interval_trace(&word, n).map_err(|e| e.to_string())?;
            let s = birkhoff_phi_trace(word.iter(), n).map_err(|e| e.to_string())?;
            for (j, iv) in g.iter().enumerate() {
                let sj = BigRational::from_integer(BigInt::from(s.at(j + 1).clone()));
                let two_sj = &sj * BigRational::from_integer(2.into());
                ensure(iv.lower >= sj && iv.upper <= two_sj, || {
                    format!("prefix {i}, n = {}: g-sum outside [S, 2S]", j + 1)
                })?;
            }
        }
        for n in 0..=12usize {
            for s in 1..=12usize {
                let mut word = BinaryWord::zeros(n);
                word.extend_from(&BinaryWord::ones(s));
                let g = &birkhoff_g_interval_trace(&word, 1).map_err(|e| e.to_string())?[0];
                let pow = |e: usize| BigRational::from_integer(BigInt::one() << e);
                let lo = pow(n);
                // 2^(n - s + 1) as a rational, valid for s > n + 1 too
                let slack = pow(n + 1) / pow(s);
                ensure(g.lower >= lo && g.upper <= &lo + slack, || {
                    format!("0^{n} 1^{s}: g outside [2^n, 2^n + 2^(n-s+1)]")
                })?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_12_entropy_proxy() {
    criterion("12", "entropy of f_m(m = 4) within 0.03 of 3/4", secs(60), || {
        let factory = StreamFactory::new(SourceSpec::Fm(4)).map_err(|e| e.to_string())?;
        let est = entropy_dim_estimate(&factory, 16, 1_000_000, SEED).map_err(|e| e.to_string())?;
        ensure((est - 0.75).abs() <= 0.03, || format!("estimate {est}"))?;
        // the factory stream matches the direct constructor
        let direct: Vec<Digit> = f_m_stream(4, 1).map_err(|e| e.to_string())?.take(64).collect();
        let via: Vec<Digit> = factory.stream(1).take(64).collect();
        ensure(direct == via, || "factory and f_m_stream disagree".into())
    });
}
