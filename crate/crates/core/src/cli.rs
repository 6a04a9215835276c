//! The `stpete` command line: one subcommand per library operation, JSON
//! reports for scalar results, CSV for tables.
//!
//! Exit status is 0 on success, 2 for malformed flags, unreadable files or
//! unparseable input, and 3 when a well-formed request violates a
//! precondition of the underlying operation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::constructions::{infinity_stream, stream_from_schedule, CantorSchedule, Filler, ZeroBlockLayout};
use crate::dyadic::{birkhoff_g_interval_trace, birkhoff_phi_at, birkhoff_phi_trace, log2_big, BinaryWord};
use crate::error::Error;
use crate::experiments::{dichotomy_series, entropy_report, weak_law, SourceSpec, StreamFactory, Threshold};
use crate::gibbs::{build_distribution, gibbs_statistics};
use crate::growth::{classify, psi_log2, BetaClass, Checkpoint, GrowthFunction, Potential, RatioTrace};
use crate::pressure::{eval_pressure, solve_t, SOLVER_TOL};
use crate::report::{
    fmt_sig, read_digit_file, to_json_line, write_construct_csv, write_spectrum_csv, write_trace_csv, ConstructRow,
};
use crate::spectrum::spectrum_curve;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

const GIBBS_TOL: f64 = 1e-16;
const SPECTRUM_TOL: f64 = 1e-15;

#[derive(Debug, Parser)]
#[command(
    name = "stpete",
    version,
    about = "Birkhoff sums of the Saint-Petersburg potential under the doubling map"
)]
pub struct Cli {
    /// Worker threads for parallel commands.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: u16,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate P(t, q) and its partial derivatives (JSON).
    Pressure {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        /// Relative tail tolerance.
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
    },
    /// Solve P(t, q) = 0 for t(q) (JSON).
    Tq {
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
    },
    /// Tabulate the Birkhoff spectrum on an alpha grid (CSV).
    Spectrum {
        #[arg(long)]
        alpha_min: f64,
        #[arg(long)]
        alpha_max: f64,
        #[arg(long)]
        steps: usize,
        /// Output file, `-` for standard output.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample Gibbs blocks and compare against the closed forms (JSON).
    Gibbs {
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Quantiles of S_n / (n ln n) over uniform points (JSON).
    WeakLaw {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Build a point whose sums track beta * Psi (JSON header, digits, CSV).
    Construct {
        /// Growth function: nlogn | n^A | 2^n^G.
        #[arg(long)]
        psi: GrowthFunction,
        /// Positive real or `inf`.
        #[arg(long, value_parser = parse_beta)]
        beta: Beta,
        #[arg(long)]
        digits: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        /// Filler word policy.
        #[arg(long, value_enum, default_value_t = FillerArg::Seeded)]
        filler: FillerArg,
    },
    /// Zero-block point with S_n / 2^(n^gamma) unbounded (JSON header, digits, CSV).
    Infinity {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        digits: usize,
    },
    /// Look up the regime table.
    Classify {
        #[arg(long)]
        psi: GrowthFunction,
        /// zero | finite | infinity.
        #[arg(long)]
        beta_class: BetaClass,
        /// phi | g.
        #[arg(long)]
        potential: Potential,
    },
    /// Ratio trace log2 S_n - log2 Psi(n) of a digit file (CSV).
    Trace {
        #[arg(long)]
        psi: GrowthFunction,
        #[arg(long)]
        digits_file: PathBuf,
        /// Last position; defaults to the last 1 in the file.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Exact Birkhoff sums S_1..S_N of a digit file (CSV `n,lower,upper`).
    Orbit {
        #[arg(long)]
        prefix_file: PathBuf,
        #[arg(long)]
        potential: Potential,
        #[arg(long)]
        n: usize,
    },
    /// Partial sums of sum_n lambda(phi >= Psi_n) (CSV).
    Dichotomy {
        /// Growth function or `const:C`.
        #[arg(long)]
        psi: Threshold,
        #[arg(long = "N")]
        n: u64,
    },
    /// Prefix-entropy dimension estimate (JSON).
    Entropy {
        /// uniform | fm:M | gibbs:Q.
        #[arg(long)]
        source: SourceSpec,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// `beta` for `construct`: finite positive or infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

fn parse_beta(s: &str) -> Result<Beta, String> {
    match s {
        "inf" | "infinity" => Ok(Beta::Infinite),
        _ => s
            .parse::<f64>()
            .map(Beta::Finite)
            .map_err(|_| format!("expected a number or `inf`, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FillerArg {
    Seeded,
    Deterministic,
}

impl From<FillerArg> for Filler {
    fn from(f: FillerArg) -> Self {
        match f {
            FillerArg::Seeded => Filler::Seeded,
            FillerArg::Deterministic => Filler::Deterministic,
        }
    }
}

/// Failure of a command, mapped onto an exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parse `argv` (program name first), run the command, and return the exit status.
pub fn dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads as usize).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    // the pool needs a `Send` closure, so output is buffered
    let mut buf = Vec::new();
    let result = pool.install(|| run(cli.command, &mut buf));
    if let Err(e) = out.write_all(&buf).and_then(|_| out.flush()) {
        let _ = writeln!(err, "error: i/o: {e}");
        return EXIT_USAGE;
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_precondition() {
                EXIT_PRECONDITION
            } else {
                EXIT_USAGE
            }
        }
    }
}

/// Full help text, including every subcommand's flags.
pub fn help_text() -> String {
    use clap::CommandFactory;
    let mut cmd = Cli::command();
    let mut text = cmd.render_long_help().to_string();
    for sub in cmd.get_subcommands_mut() {
        if sub.get_name() == "help" {
            continue;
        }
        text.push_str(&format!("\n== {} ==\n", sub.get_name()));
        text.push_str(&sub.render_long_help().to_string());
    }
    text
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    writeln!(out, "{}", to_json_line(value))
}

fn run(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Pressure { t, q, tol } => json_line(out, &eval_pressure(t, q, tol)?)?,
        Command::Tq { q } => json_line(out, &solve_t(q, SOLVER_TOL)?)?,
        Command::Spectrum {
            alpha_min,
            alpha_max,
            steps,
            out: path,
        } => {
            let rows = spectrum_curve(alpha_min, alpha_max, steps, SPECTRUM_TOL)?;
            if path.as_os_str() == "-" {
                write_spectrum_csv(&rows, &mut *out)?;
            } else {
                let file = File::create(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                write_spectrum_csv(&rows, BufWriter::new(file))?;
            }
        }
        Command::Gibbs { q, ell, reps, seed } => {
            let dist = build_distribution(q, GIBBS_TOL)?;
            json_line(out, &gibbs_statistics(&dist, ell, reps, seed)?)?;
        }
        Command::WeakLaw { n, samples, seed } => json_line(out, &weak_law(n, samples, seed)?)?,
        Command::Construct {
            psi,
            beta,
            digits,
            m,
            seed,
            filler,
        } => construct(out, psi, beta, digits, m, seed, filler.into())?,
        Command::Infinity { gamma, digits } => infinity(out, gamma, digits)?,
        Command::Classify {
            psi,
            beta_class,
            potential,
        } => {
            let v = classify(&psi, beta_class, potential);
            writeln!(out, "{}: {}", v.verdict, v.citation)?;
        }
        Command::Trace { psi, digits_file, n } => {
            let word = read_digit_file(&digits_file)?;
            let n = match n {
                Some(n) => n,
                None => last_one(&word).ok_or(Error::InsufficientDigits { position: 1 })? as u64,
            };
            let trace = crate::growth::ratio_trace(word.iter(), &psi, n)?;
            write_trace_csv(&trace, &mut *out)?;
        }
        Command::Orbit {
            prefix_file,
            potential,
            n,
        } => {
            let word = read_digit_file(&prefix_file)?;
            orbit(out, &word, potential, n)?;
        }
        Command::Dichotomy { psi, n } => {
            let sums = dichotomy_series(&psi, n)?;
            writeln!(out, "N,partial_sum")?;
            let mut k = 1u64;
            loop {
                let at = k.min(n);
                writeln!(out, "{at},{}", fmt_sig(sums[at as usize - 1]))?;
                if at == n {
                    break;
                }
                k = k.saturating_mul(2);
            }
        }
        Command::Entropy {
            source,
            depth,
            samples,
            seed,
        } => {
            let label = source_label(source);
            let factory = StreamFactory::new(source)?;
            json_line(out, &entropy_report(&factory, &label, depth, samples, seed)?)?;
        }
    }
    Ok(())
}

fn source_label(source: SourceSpec) -> String {
    match source {
        SourceSpec::Uniform => "uniform".into(),
        SourceSpec::Fm(m) => format!("fm:{m}"),
        SourceSpec::Gibbs(q) => format!("gibbs:{q}"),
    }
}

/// 1-based position of the last `1`.
fn last_one(word: &BinaryWord) -> Option<usize> {
    word.digits().iter().rposition(|d| d.is_one()).map(|i| i + 1)
}

#[derive(Serialize)]
struct ConstructHeader {
    psi: String,
    beta: String,
    m: usize,
    seed: u64,
    filler: Filler,
    digits: usize,
    /// Growth function the schedule actually tracks (differs for `beta = inf`).
    tracked_psi: String,
    tracked_beta: f64,
    /// Exponent of `N_k = floor(k^(1/(1-gamma) + delta))`; absent for `N_k = k^2`.
    delta: Option<f64>,
    first_feasible: u64,
}

fn construct(
    out: &mut dyn Write,
    psi: GrowthFunction,
    beta: Beta,
    digits: usize,
    m: usize,
    seed: u64,
    filler: Filler,
) -> CmdResult {
    let schedule = match beta {
        Beta::Finite(b) => CantorSchedule::new(psi, b, m)?,
        Beta::Infinite => CantorSchedule::for_infinite_beta(psi, m)?,
    };
    let first = schedule.first_feasible()?;
    let header = ConstructHeader {
        psi: psi.to_string(),
        beta: match beta {
            Beta::Finite(b) => b.to_string(),
            Beta::Infinite => "inf".into(),
        },
        m,
        seed,
        filler,
        digits,
        tracked_psi: schedule.psi.to_string(),
        tracked_beta: schedule.beta,
        delta: schedule.delta,
        first_feasible: first,
    };
    json_line(out, &header)?;
    let word = stream_from_schedule(schedule.clone(), filler, seed)?.take_word(digits);
    out.write_all(word.to_line().as_bytes())?;

    let levels: Vec<(u64, u64)> = (first..)
        .map(|k| (k, schedule.checkpoint(k)))
        .take_while(|&(_, n)| n as usize <= digits)
        .filter(|&(_, n)| n >= 2)
        .collect();
    let positions: Vec<usize> = levels.iter().map(|&(_, n)| n as usize).collect();
    let sums = birkhoff_phi_at(stream_from_schedule(schedule.clone(), filler, seed)?, &positions)?;
    let rows = levels
        .iter()
        .zip(&sums)
        .map(|(&(k, n), s)| {
            let log2_psi = psi_log2(&psi, n)?;
            let ratio = match beta {
                Beta::Finite(_) => crate::constructions::checkpoint_ratio(s, &schedule, n),
                Beta::Infinite => (log2_big(s) - log2_psi).exp2(),
            };
            Ok(ConstructRow {
                k,
                n_k: n,
                s_log2: log2_big(s),
                psi_log2: log2_psi,
                ratio,
            })
        })
        .collect::<crate::error::Result<Vec<_>>>()?;
    write_construct_csv(&rows, &mut *out)?;
    Ok(())
}

#[derive(Serialize)]
struct InfinityHeader {
    gamma: f64,
    delta: f64,
    k_start: u32,
    density_constant: f64,
    digits: usize,
}

fn infinity(out: &mut dyn Write, gamma: f64, digits: usize) -> CmdResult {
    let layout = ZeroBlockLayout::new(gamma)?;
    json_line(
        out,
        &InfinityHeader {
            gamma,
            delta: layout.delta,
            k_start: layout.k_start,
            density_constant: layout.density_constant(),
            digits,
        },
    )?;
    out.write_all(infinity_stream(gamma)?.take_word(digits).to_line().as_bytes())?;
    let psi = GrowthFunction::double_exp(gamma)?;
    let positions: Vec<usize> = (layout.k_start..63)
        .map(|k| layout.post_block(k))
        .take_while(|&p| p as usize <= digits)
        .map(|p| p as usize)
        .collect();
    let sums = birkhoff_phi_at(infinity_stream(gamma)?, &positions)?;
    let checkpoints = positions
        .iter()
        .zip(&sums)
        .map(|(&n, s)| {
            let log2_s = log2_big(s);
            let log2_psi = psi.log2_at(n as f64);
            Checkpoint {
                n: n as u64,
                log2_s,
                log2_psi,
                log_ratio: log2_s - log2_psi,
            }
        })
        .collect();
    write_trace_csv(&RatioTrace { checkpoints }, &mut *out)?;
    Ok(())
}

fn orbit(out: &mut dyn Write, word: &BinaryWord, potential: Potential, n: usize) -> CmdResult {
    writeln!(out, "n,lower,upper")?;
    match potential {
        Potential::Phi => {
            let trace = birkhoff_phi_trace(word.iter(), n)?;
            for i in 1..=n {
                let s = trace.at(i);
                writeln!(out, "{i},{s},{s}")?;
            }
        }
        Potential::G => {
            for (i, iv) in birkhoff_g_interval_trace(word, n)?.iter().enumerate() {
                writeln!(out, "{},{},{}", i + 1, iv.lower, iv.upper)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("stpete").chain(args.iter().copied());
        let code = dispatch(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_line() {
        let (code, out, _) = run_args(&["classify", "--psi", "2^n^0.6", "--beta-class", "finite", "--potential", "phi"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("empty: "));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["pressure", "--t", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["tq", "--q", "1", "--bogus", "2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["tq", "--q", "abc"]).0, EXIT_USAGE);
        let (code, _, err) = run_args(&["tq", "--q", "-1"]);
        assert_eq!(code, EXIT_PRECONDITION, "{err}");
        assert_eq!(run_args(&["weak-law", "--n", "8", "--samples", "100", "--seed", "1"]).0, EXIT_PRECONDITION);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn dichotomy_rows() {
        let (code, out, _) = run_args(&["dichotomy", "--psi", "const:2", "--N", "5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "N,partial_sum\n1,0.5\n2,1\n4,2\n5,2.5\n");
    }
}
