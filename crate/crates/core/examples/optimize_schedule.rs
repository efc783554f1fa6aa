//! Static placement of J unit jobs on k machines with m slots each,
//! including an instance where the pigeonhole forces a drop.
//!
//! `cargo run --example optimize_schedule`

use gasched::matrix::OverloadConfig;
use gasched::scheduler::{dropped_jobs, optimize_schedule, SchedulingProblem};

fn main() -> gasched::Result<()> {
    for (j, k, m) in [(6, 3, 3), (7, 3, 3), (5, 2, 2)] {
        let mut problem = SchedulingProblem::uniform(j, k, m);
        problem.fitness.overload = OverloadConfig { w: 2, delta: 0 };
        problem.ga.rng_seed = 4;
        let out = optimize_schedule(&problem)?;
        println!(
            "J={j} k={k} m={m}: fitness {} (engine {}), loads {:?}, dropped {:?}, {} generations",
            out.fitness,
            out.unpolished_fitness,
            out.matrix.column_loads(),
            dropped_jobs(&out.matrix),
            out.history.len()
        );
    }
    Ok(())
}
