//! Exact Birkhoff sums on digit words: the `phi` trace, the block
//! decomposition, and rational enclosures for `g(x) = 1/x`.

use stpetersburg::constructions::approx_word;
use stpetersburg::dyadic::{accelerated_sums, birkhoff_g_interval_trace, birkhoff_phi_trace, return_blocks, BinaryWord};

fn main() -> stpetersburg::Result<()> {
    let word: BinaryWord = "0010110001".parse()?;
    let n = word.len();
    let s = birkhoff_phi_trace(word.iter(), n)?;
    let g = birkhoff_g_interval_trace(&word, n)?;
    println!("x = {word}...");
    for i in 1..=n {
        let (lo, hi) = g[i - 1].to_f64_outward();
        println!("  S_{i:<2} = {:>4}   g-sum in [{lo:.3}, {hi:.3}]", s.at(i));
    }
    let blocks = return_blocks(word.digits());
    let hat = accelerated_sums(&blocks)?;
    println!("blocks {:?}, S^ = {:?}", blocks.blocks, hat.hat);

    // a word whose sum lands just above a target
    let w = approx_word(&1000u32.into(), 3)?;
    println!("\nsum word for W = 1000, n = 3: {} (sum {})", w.word, w.target);
    Ok(())
}
