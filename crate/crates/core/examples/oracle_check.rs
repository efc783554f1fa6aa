//! Exhaustive optimum of small instances compared with a seed sweep of the
//! optimizer.
//!
//! `cargo run --example oracle_check`

use gasched::oracle::{brute_force_best, enumerate_assignments};
use gasched::scheduler::{optimize_schedule, SchedulingProblem};

fn main() -> gasched::Result<()> {
    println!(
        "assignments of 2 jobs to 2 machines with 1 slot: {}",
        enumerate_assignments(2, 2, 1)?.count()
    );
    for (j, k, m) in [(4, 2, 2), (6, 3, 3), (7, 3, 3)] {
        let problem = SchedulingProblem::uniform(j, k, m);
        let oracle = brute_force_best(j, k, m, &problem.fitness)?;
        let hits = (0..20)
            .filter(|&seed| {
                let mut p = problem.clone();
                p.ga.rng_seed = seed;
                optimize_schedule(&p).is_ok_and(|o| o.fitness == oracle.optimum)
            })
            .count();
        println!(
            "J={j} k={k} m={m}: optimum {} ({} optimal assignments, witness {:?}), optimizer hit it in {hits}/20 seeds",
            oracle.optimum, oracle.optimal_count, oracle.witness
        );
    }
    Ok(())
}
