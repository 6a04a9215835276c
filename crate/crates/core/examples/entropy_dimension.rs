//! Prefix entropy per digit as a dimension proxy for three samplers.

use stpetersburg::experiments::{entropy_report, SourceSpec, StreamFactory};
use stpetersburg::gibbs::build_distribution;

fn main() -> stpetersburg::Result<()> {
    // a multiple of every period below, so no partial filler words are counted
    let depth = 16;
    let samples = 1_000_000;
    for label in ["uniform", "fm:2", "fm:4", "fm:8", "gibbs:1"] {
        let spec: SourceSpec = label.parse()?;
        let target = match spec {
            SourceSpec::Uniform => 1.0,
            SourceSpec::Fm(m) => (m as f64 - 1.0) / m as f64,
            SourceSpec::Gibbs(q) => build_distribution(q, 1e-16)?.entropy_rate(),
        };
        let r = entropy_report(&StreamFactory::new(spec)?, label, depth, samples, 5)?;
        println!("{label:<8} estimate {:.4}  target {target:.4}  prefixes {}", r.estimate, r.distinct_prefixes);
    }
    Ok(())
}
