//! Partial sums of `sum_n lambda(phi >= Psi_n)`: bounded for `n^2`,
//! slowly unbounded for `n log n`.

use stpetersburg::experiments::{dichotomy_series, Threshold};

fn main() -> stpetersburg::Result<()> {
    let n = 1u64 << 20;
    for spec in ["n^2", "n^1.5", "nlogn"] {
        let sums = dichotomy_series(&spec.parse::<Threshold>()?, n)?;
        let at: Vec<String> = (4..=20).step_by(4).map(|k| format!("{:.6}", sums[(1usize << k) - 1])).collect();
        println!("{spec:<6} at 2^4, 2^8, .., 2^20: {}", at.join("  "));
    }
    Ok(())
}
