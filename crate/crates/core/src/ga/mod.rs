//! Generic genetic-algorithm engine over fixed-length binary genomes.
//!
//! Fitness is minimized throughout. A run evaluates an initial population,
//! then repeatedly applies [`step_generation`] (elitism, size-2 tournaments,
//! agreement-preserving [`crossover`], resampling [`mutate`]) until
//! [`has_converged`] reports either the generation budget or a stagnant best
//! fitness.
//!
//! ```
//! use gasched::ga::{run, GaConfig, Genome, Popcount};
//!
//! let config = GaConfig { population_size: 20, max_generations: 100, ..GaConfig::default() };
//! let outcome = run(|rng| Genome::random(12, rng), &Popcount, &config).unwrap();
//! assert_eq!(outcome.best.fitness(), Some(0.0));
//! ```

mod config;
mod convergence;
mod engine;
mod genome;
mod operators;
mod population;

pub use config::GaConfig;
pub use convergence::{epsilon_good_set, has_converged};
pub use engine::{run, step_generation, RunOutcome};
pub use genome::Genome;
pub use operators::{crossover, mutate, select_parents, Selection};
pub use population::{evaluate, FitnessFunction, Individual, Popcount, Population, WithDimension};
