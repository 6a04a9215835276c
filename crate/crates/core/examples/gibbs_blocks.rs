//! Gibbs block samples against the closed-form Birkhoff average and local dimension.

use stpetersburg::dyadic::{accelerated_sums, birkhoff_phi_sum};
use stpetersburg::gibbs::{build_distribution, gibbs_statistics, sample_blocks};

fn main() -> stpetersburg::Result<()> {
    for q in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let dist = build_distribution(q, 1e-16)?;
        let s = gibbs_statistics(&dist, 10_000, 50, 11)?;
        println!(
            "q = {q:<4}  alpha {:.6} (hat {:.6} +- {:.6})  local dim {:.6} (hat {:.6})  longest block {}",
            dist.alpha, s.alpha_hat, s.alpha_se, s.localdim_target, s.localdim_hat, s.max_block_seen
        );
    }

    // one sample, checked through the transference identity
    let dist = build_distribution(0.5, 1e-16)?;
    let blocks = sample_blocks(&dist, 200, 3);
    let digits: Vec<_> = blocks.digits().collect();
    let s = birkhoff_phi_sum(digits.iter().copied(), digits.len())?;
    let hat = accelerated_sums(&blocks)?.hat.last().cloned().unwrap_or_default();
    println!("\n200 blocks, {} digits: S = {s}, 2 S^ - l = {}", digits.len(), hat * 2u32 - 200u32);
    Ok(())
}
