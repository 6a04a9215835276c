//! Quantiles of `S_n / (n ln n)` for Lebesgue-random points at growing `n`.
//! Convergence is logarithmically slow.

use stpetersburg::experiments::{weak_law, WEAK_LAW_LIMIT};

fn main() -> stpetersburg::Result<()> {
    println!("limit 1 / (2 ln 2) = {WEAK_LAW_LIMIT:.6}");
    for k in [10, 12, 14, 16] {
        let r = weak_law(1 << k, 1000, 2024)?;
        println!(
            "n = 2^{k}:  q10 {:.4}  median {:.4}  q90 {:.4}  iqr {:.4}",
            r.quantile(0.1).unwrap_or(f64::NAN),
            r.median(),
            r.quantile(0.9).unwrap_or(f64::NAN),
            r.iqr()
        );
    }
    Ok(())
}
