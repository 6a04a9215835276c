//! A point whose Birkhoff sums follow `beta * Psi(n)` at the checkpoints
//! `N_k`, for `Psi(n) = n^2`, `beta = 1` and filler period `m = 16`.

use stpetersburg::constructions::{cantor_stream, checkpoint_ratio, CantorSchedule, Filler};
use stpetersburg::dyadic::birkhoff_phi_at;
use stpetersburg::growth::GrowthFunction;

fn main() -> stpetersburg::Result<()> {
    let psi = GrowthFunction::power(2.0)?;
    let schedule = CantorSchedule::new(psi, 1.0, 16)?;
    let first = schedule.first_feasible()?;
    println!("first feasible level: {first}");
    for level in schedule.levels_through(2_500)?.iter().filter(|l| l.k >= first).take(5) {
        println!(
            "k = {:>2}  N_k = {:>5}  W_k = {:>9}  n_k = {}  fillers = {:>2}  word length = {}",
            level.k, level.n_k, level.w, level.precision, level.fillers, level.word_len
        );
    }

    let ks: Vec<u64> = [20, 50, 100, 200, 316].into();
    let positions: Vec<usize> = ks.iter().map(|&k| schedule.checkpoint(k) as usize).collect();
    let stream = cantor_stream(psi, 1.0, 16, Filler::Seeded, 2024)?;
    for (k, s) in ks.iter().zip(birkhoff_phi_at(stream, &positions)?) {
        let n = schedule.checkpoint(*k);
        println!("S_{n:<6} = {s:>12}   S / Psi = {:.6}", checkpoint_ratio(&s, &schedule, n));
    }
    Ok(())
}
