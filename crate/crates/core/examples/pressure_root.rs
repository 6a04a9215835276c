//! Root `t(q)` of the pressure equation and its slope across scales of `q`.
//!
//! `cargo run --example pressure_root`

use stpetersburg::pressure::{eval_pressure, solve_t, SOLVER_TOL};

fn main() -> stpetersburg::Result<()> {
    println!("{:>8}  {:>20}  {:>12}  {:>12}  {:>12}", "q", "t(q)", "1 - t", "t + q", "-1 - t'");
    for q in [1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
        let s = solve_t(q, SOLVER_TOL)?;
        println!(
            "{q:>8}  {:>20.15}  {:>12.6e}  {:>12.6e}  {:>12.6e}",
            s.t_of_q, s.deficit, s.floor_gap, s.slope_excess
        );
    }
    let p = eval_pressure(0.0, 1.0, 1e-15)?;
    println!("\nP(0, 1) = {:.15} using {} terms", p.value, p.terms_used);
    Ok(())
}
