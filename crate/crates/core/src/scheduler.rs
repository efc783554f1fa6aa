//! Dropped-jobs objective and the schedule optimizer.
//!
//! A static instance has `J` jobs, `k` machines and a per-machine queue depth
//! `m`. It is encoded as a matrix with one labelled body row per job; the
//! genome is that body flattened row-major (`J·k` bits). Decoding repairs the
//! one-machine-per-job row constraint and clears whatever exceeds a machine's
//! `m` slots, which leaves those jobs dropped.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ga::{self, FitnessFunction, GaConfig, Genome};
use crate::matrix::{OverloadConfig, ScheduleMatrix};
use crate::rng::{self, streams};
use crate::{Error, Job, JobId, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulerFitnessConfig {
    /// Cost per dropped job; must dominate the other terms.
    pub drop_weight: f64,
    /// Cost per machine with more than `w` waiting jobs.
    pub overload_weight: f64,
    /// Cost per surplus `1` in a row.
    pub infeasible_row_penalty: f64,
    pub overload: OverloadConfig,
}

impl Default for SchedulerFitnessConfig {
    fn default() -> Self {
        SchedulerFitnessConfig {
            drop_weight: 100.0,
            overload_weight: 1.0,
            infeasible_row_penalty: 10.0,
            overload: OverloadConfig::default(),
        }
    }
}

impl SchedulerFitnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.drop_weight > 0.0 && self.drop_weight.is_finite()) {
            return Err(Error::config("drop_weight", "must be finite and positive"));
        }
        if !(self.overload_weight >= 0.0 && self.overload_weight.is_finite()) {
            return Err(Error::config(
                "overload_weight",
                "must be finite and non-negative",
            ));
        }
        if !(self.infeasible_row_penalty >= 0.0 && self.infeasible_row_penalty.is_finite()) {
            return Err(Error::config(
                "infeasible_row_penalty",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// The three counts the objective weighs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub struct FitnessTerms {
    pub drops: usize,
    pub overloads: usize,
    pub row_violations: usize,
}

impl FitnessTerms {
    pub fn of(matrix: &ScheduleMatrix, w: usize) -> Self {
        FitnessTerms {
            drops: matrix.dropped_rows().len(),
            overloads: matrix.overloaded_count(w),
            row_violations: matrix.row_violations(),
        }
    }

    pub fn weigh(&self, cfg: &SchedulerFitnessConfig) -> f64 {
        cfg.drop_weight * self.drops as f64
            + cfg.overload_weight * self.overloads as f64
            + cfg.infeasible_row_penalty * self.row_violations as f64
    }
}

/// `A·drops + B·overloaded machines + P·row surplus`; zero exactly when the
/// schedule drops nothing, overloads nothing and respects the row constraint.
pub fn schedule_fitness(matrix: &ScheduleMatrix, cfg: &SchedulerFitnessConfig) -> f64 {
    FitnessTerms::of(matrix, cfg.overload.w).weigh(cfg)
}

/// Both constraints: every row has at most one `1`, and at most `delta`
/// machines are overloaded.
pub fn feasible(matrix: &ScheduleMatrix, cfg: &SchedulerFitnessConfig) -> bool {
    matrix.is_row_feasible() && matrix.overloaded_count(cfg.overload.w) <= cfg.overload.delta
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulingProblem {
    pub jobs: Vec<Job>,
    pub machines: usize,
    pub queue_depth: usize,
    pub fitness: SchedulerFitnessConfig,
    pub ga: GaConfig,
}

impl SchedulingProblem {
    /// `jobs` unit jobs with ids `0..jobs`.
    pub fn uniform(jobs: usize, machines: usize, queue_depth: usize) -> Self {
        SchedulingProblem {
            jobs: (0..jobs as u64).map(|id| Job::new(id, 0, 1)).collect(),
            machines,
            queue_depth,
            fitness: SchedulerFitnessConfig::default(),
            ga: GaConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs.is_empty() {
            return Err(Error::config("jobs", "at least one job is required"));
        }
        if self.machines == 0 {
            return Err(Error::config("machines", "must be at least 1"));
        }
        if self.queue_depth == 0 {
            return Err(Error::config("queue_depth", "must be at least 1"));
        }
        self.fitness.validate()?;
        self.fitness
            .overload
            .validate(self.queue_depth, self.machines)?;
        self.ga.validate()
    }

    /// Empty matrix with one labelled body row per job.
    pub fn base_matrix(&self) -> Result<ScheduleMatrix> {
        let mut m = ScheduleMatrix::new(self.jobs.len(), self.machines)?;
        for (i, job) in self.jobs.iter().enumerate() {
            m.set_label(i + 1, Some(job.id));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleOutcome {
    /// Best schedule found, after the final rebalance and dropped-row pass.
    pub matrix: ScheduleMatrix,
    pub fitness: f64,
    /// Fitness of the engine's best individual before the final pass.
    pub unpolished_fitness: f64,
    /// Per-generation best fitness.
    pub history: Vec<f64>,
}

struct Decoder<'a> {
    base: &'a ScheduleMatrix,
    capacity: usize,
    cfg: &'a SchedulerFitnessConfig,
}

impl Decoder<'_> {
    fn decode(&self, genome: &Genome) -> ScheduleMatrix {
        self.base
            .with_body_bits(genome.bits())
            .enforce_capacity(self.capacity)
    }
}

impl FitnessFunction for Decoder<'_> {
    fn dimension(&self) -> Option<usize> {
        Some(self.base.depth() * self.base.machines())
    }

    fn fitness(&self, genome: &Genome) -> f64 {
        schedule_fitness(&self.decode(genome), self.cfg)
    }
}

/// Every job on a uniformly random machine; a job whose machine is already
/// full stays in a dropped row.
fn random_placement<R: Rng + ?Sized>(
    base: &ScheduleMatrix,
    capacity: usize,
    rng: &mut R,
) -> Genome {
    let k = base.machines();
    let mut loads = vec![0usize; k];
    let mut bits = vec![false; base.depth() * k];
    for r in 1..=base.depth() {
        if base.label(r).is_none() {
            continue;
        }
        let j = rng.gen_range(0..k);
        if loads[j] < capacity {
            loads[j] += 1;
            bits[(r - 1) * k + j] = true;
        }
    }
    Genome::new(bits).expect("matrix body is non-empty")
}

/// Runs the engine on a static instance and polishes the winner.
pub fn optimize_schedule(problem: &SchedulingProblem) -> Result<ScheduleOutcome> {
    problem.validate()?;
    let base = problem.base_matrix()?;
    optimize(
        &base,
        problem.queue_depth,
        &problem.fitness,
        &problem.ga,
        false,
    )
}

/// Re-optimizes the machine assignment of the jobs already in `base`.
///
/// Labels and the head row are fixed; only the body bits evolve. The
/// current body is part of the initial population, so the result is never
/// worse than `base`.
pub fn optimize_matrix(
    base: &ScheduleMatrix,
    capacity: usize,
    fitness: &SchedulerFitnessConfig,
    ga: &GaConfig,
) -> Result<ScheduleOutcome> {
    fitness.validate()?;
    optimize(base, capacity, fitness, ga, true)
}

fn optimize(
    base: &ScheduleMatrix,
    capacity: usize,
    cfg: &SchedulerFitnessConfig,
    ga_cfg: &GaConfig,
    include_base: bool,
) -> Result<ScheduleOutcome> {
    let decoder = Decoder {
        base,
        capacity,
        cfg,
    };
    let mut seeded_base = include_base.then(|| base.to_genome());
    let outcome = ga::run(
        |rng| {
            seeded_base
                .take()
                .unwrap_or_else(|| random_placement(base, capacity, rng))
        },
        &decoder,
        ga_cfg,
    )?;

    let winner = decoder.decode(&outcome.best.genome);
    let unpolished_fitness = schedule_fitness(&winner, cfg);
    let mut rng = rng::stream(ga_cfg.rng_seed, streams::POLISH);
    let matrix = polish(&winner, capacity, &cfg.overload, &mut rng)?;
    let fitness = schedule_fitness(&matrix, cfg);
    Ok(ScheduleOutcome {
        matrix,
        fitness,
        unpolished_fitness,
        history: outcome.history,
    })
}

/// Final pass: place dropped jobs where a machine has room, then rebalance.
pub fn polish<R: Rng + ?Sized>(
    matrix: &ScheduleMatrix,
    capacity: usize,
    overload: &OverloadConfig,
    rng: &mut R,
) -> Result<ScheduleMatrix> {
    let placed = matrix.mutate_dropped_rows_bounded(capacity, rng);
    Ok(placed.rebalance_with_capacity(overload, capacity)?.matrix)
}

/// Labels of the jobs left dropped in `matrix`.
pub fn dropped_jobs(matrix: &ScheduleMatrix) -> Vec<JobId> {
    matrix
        .dropped_rows()
        .into_iter()
        .filter_map(|r| matrix.label(r))
        .collect()
}
