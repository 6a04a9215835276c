//! For `1/2 <= gamma < 1` a point with `S_n / 2^(n^gamma) -> infinity`:
//! long zero blocks after each power of two, ones everywhere else.

use stpetersburg::constructions::{infinity_stream, ZeroBlockLayout};
use stpetersburg::dyadic::{birkhoff_phi_at, log2_big};

fn main() -> stpetersburg::Result<()> {
    let gamma = 0.6;
    let layout = ZeroBlockLayout::new(gamma)?;
    println!("delta = {}, density constant = {:.4}", layout.delta, layout.density_constant());
    let ks: Vec<u32> = (layout.k_start.max(4)..=18).collect();
    let positions: Vec<usize> = ks.iter().map(|&k| layout.post_block(k) as usize).collect();
    let sums = birkhoff_phi_at(infinity_stream(gamma)?, &positions)?;
    for ((k, n), s) in ks.iter().zip(&positions).zip(&sums) {
        let excess = log2_big(s) - (*n as f64).powf(gamma);
        let density = layout.constrained_count(*n as u64) as f64 / *n as f64;
        println!("k = {k:>2}  n = {n:>6}  log2 S_n - n^gamma = {excess:>10.2}  zero density {density:.4}");
    }
    Ok(())
}
