//! The full-dimension / empty table for fast-growing normalizations.

use stpetersburg::growth::{classify, BetaClass, GrowthFunction, Potential};

fn main() -> stpetersburg::Result<()> {
    let psis: Vec<GrowthFunction> = ["nlogn", "n^3", "2^n^0.4", "2^n^0.5", "2^n^0.8", "2^n^1", "2^n^2"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    println!("{:<10} {:<16} {:<16} {:<16}", "psi", "beta = 0", "0 < beta < inf", "beta = inf");
    for psi in &psis {
        let cells: Vec<String> = [BetaClass::Zero, BetaClass::FinitePositive, BetaClass::Infinity]
            .into_iter()
            .map(|c| classify(psi, c, Potential::Phi).verdict.to_string())
            .collect();
        println!("{:<10} {:<16} {:<16} {:<16}", psi.to_string(), cells[0], cells[1], cells[2]);
    }
    let v = classify(&psis[4], BetaClass::FinitePositive, Potential::G);
    println!("\n2^n^0.8, finite beta, g: {}", v.citation);
    Ok(())
}
