//! Genetic optimization of job placement on an array of single-core machines.
//!
//! The crate is organised around a binary schedule matrix: one label column
//! naming the job held by each row, a head row for the job at the front of the
//! line, and a body of waiting slots where a `1` in column `j` means the job is
//! queued for machine `j`. On top of that sit
//!
//! - [`ga`]: a generic engine over fixed-length bit genomes (tournament
//!   selection with elitism, agreement-preserving crossover, resampling
//!   mutation, generation-count and stagnation stopping rules);
//! - [`matrix`]: the matrix itself with its row constraint, queue shift,
//!   head completion and recall, overload detection and the rebalancing and
//!   dropped-row operators;
//! - [`scheduler`]: the dropped-jobs fitness and the end-to-end optimizer;
//! - [`sim`]: a discrete-time simulator that feeds a job stream through the
//!   matrix with stochastic send failures;
//! - [`oracle`]: exhaustive search used as ground truth on small instances;
//! - [`cli`]: the `gasched` command line (`optimize`, `simulate`,
//!   `oracle-check`, `print-config`).
//!
//! Every stochastic routine takes its randomness from [`rng::GaRng`], a
//! ChaCha8 generator seeded from a single `u64`, so runs are reproducible
//! across platforms.

pub mod cli;
pub mod config;
mod error;
pub mod ga;
mod job;
pub mod matrix;
pub mod oracle;
pub mod rng;
pub mod scheduler;
pub mod sim;

pub use error::{Error, Result};
pub use job::{Job, JobId};
