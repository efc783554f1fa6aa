//! The engine on a custom fitness: minimize the number of ones, then a
//! closure that targets a fixed bit pattern.
//!
//! `cargo run --example popcount`

use gasched::ga::{run, GaConfig, Genome, Popcount};

fn main() -> gasched::Result<()> {
    let cfg = GaConfig {
        population_size: 30,
        max_generations: 100,
        rng_seed: 1,
        ..GaConfig::default()
    };
    let out = run(|r| Genome::random(32, r), &Popcount, &cfg)?;
    println!(
        "popcount: best {} after {} generations",
        out.best.genome,
        out.history.len()
    );

    let target = Genome::from_bits(&[1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0])?;
    let distance = |g: &Genome| g.hamming(&target) as f64;
    let out = run(|r| Genome::random(target.len(), r), &distance, &cfg)?;
    println!(
        "pattern:  best {} (distance {}) history {:?}",
        out.best.genome,
        out.best.fitness().unwrap_or(f64::NAN),
        out.history
    );
    Ok(())
}
