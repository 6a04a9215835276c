//! The Birkhoff spectrum `alpha -> dim E(alpha)` as CSV on stdout.
//!
//! `cargo run --example birkhoff_spectrum -- 1 50 25`

use std::io;

use stpetersburg::report::write_spectrum_csv;
use stpetersburg::spectrum::{dim_at_alpha, spectrum_curve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (lo, hi, steps) = match args[..] {
        [lo, hi, steps] => (lo, hi, steps as usize),
        _ => (1.0, 20.0, 20),
    };
    let rows = spectrum_curve(lo, hi, steps, 1e-15)?;
    write_spectrum_csv(&rows, io::stdout().lock())?;

    let far = dim_at_alpha(1e4, 1e-15)?;
    eprintln!("dim E(1e4) = {:.12} (saturated: {})", far.dimension, far.saturated);
    Ok(())
}
