//! Resolved run configuration for the command line.
//!
//! A config file is a single flat JSON object whose keys match the fields of
//! [`RunConfig`]; command-line flags use the same names in kebab case
//! (`queue_depth` ↔ `--queue-depth`). Flags override file values, which
//! override the defaults. Unknown keys are rejected.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::ga::GaConfig;
use crate::matrix::OverloadConfig;
use crate::scheduler::{SchedulerFitnessConfig, SchedulingProblem};
use crate::sim::SimConfig;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Both,
}

macro_rules! run_config {
    ($($(#[doc = $doc:literal])* $field:ident : $ty:ty = $default:expr;)*) => {
        /// Every tunable of a run, flat.
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        pub struct RunConfig {
            $($(#[doc = $doc])* pub $field: $ty,)*
            pub workload: Option<PathBuf>,
            pub out: Option<PathBuf>,
            pub format: OutputFormat,
        }

        impl Default for RunConfig {
            fn default() -> Self {
                RunConfig {
                    $($field: $default,)*
                    workload: None,
                    out: None,
                    format: OutputFormat::Json,
                }
            }
        }

        /// Partial config: the contents of a config file, or the flags
        /// given on the command line.
        #[derive(Clone, Debug, Default, PartialEq, Deserialize, clap::Args)]
        #[serde(default, deny_unknown_fields)]
        pub struct ConfigOverrides {
            $($(#[doc = $doc])* #[arg(long, global = true)] pub $field: Option<$ty>,)*
            /// Workload file for `simulate`.
            #[arg(long, global = true)]
            pub workload: Option<PathBuf>,
            /// Output path; stdout when absent.
            #[arg(long, global = true)]
            pub out: Option<PathBuf>,
            /// Output format; `both` writes JSON to `--out` and CSV beside it.
            #[arg(long, global = true, value_enum)]
            pub format: Option<OutputFormat>,
        }

        impl ConfigOverrides {
            fn apply(&self, cfg: &mut RunConfig) {
                $(if let Some(v) = &self.$field { cfg.$field = v.clone(); })*
                if let Some(v) = &self.workload { cfg.workload = Some(v.clone()); }
                if let Some(v) = &self.out { cfg.out = Some(v.clone()); }
                if let Some(v) = self.format { cfg.format = v; }
            }

            fn sets(&self, key: &str) -> bool {
                match key {
                    $(stringify!($field) => self.$field.is_some(),)*
                    "workload" => self.workload.is_some(),
                    "out" => self.out.is_some(),
                    "format" => self.format.is_some(),
                    _ => false,
                }
            }
        }
    };
}

run_config! {
    /// Root seed.
    seed: u64 = 0;
    /// Generation budget, counting the initial population.
    generations: usize = 200;
    /// Population size.
    population: usize = 40;
    /// Per-bit resampling probability.
    mutation_rate: f64 = 0.05;
    /// Probability that a selected pair is recombined.
    crossover_rate: f64 = 0.9;
    /// Best members copied unchanged into each generation.
    elite_count: usize = 2;
    /// Generations without improvement before stopping.
    stagnation_window: usize = 10;
    /// Largest change in best fitness still counted as no improvement.
    stagnation_tol: f64 = 0.0;
    /// Number of machines (matrix columns).
    machines: usize = 3;
    /// Waiting slots per machine for `optimize`; length of the line for
    /// `simulate`.
    queue_depth: usize = 3;
    /// Load above which a machine counts as overloaded.
    w: usize = 2;
    /// Overloaded machines tolerated by a feasible schedule.
    delta: usize = 0;
    /// Fitness weight of a dropped job.
    drop_weight: f64 = 100.0;
    /// Fitness weight of an overloaded machine.
    overload_weight: f64 = 1.0;
    /// Fitness weight of each surplus bit in a row.
    infeasible_row_penalty: f64 = 10.0;
    /// Number of unit jobs for `optimize` and `oracle-check`.
    jobs: usize = 6;
    /// Number of consecutive seeds tried by `oracle-check`.
    seeds: u64 = 20;
    /// Probability that a dispatch fails to set its bit.
    send_failure_prob: f64 = 0.0;
    /// Ticks between maintenance passes in `simulate`.
    rebalance_interval: u64 = 5;
    /// Simulated ticks.
    horizon: u64 = 100;
    /// Recalls allowed per job before it is dropped.
    max_recalls: u32 = 3;
    /// Run the optimizer at each rebalance of `simulate` (`--ga-rebalance true`).
    ga_rebalance: bool = false;
}

/// Where a resolved value came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Flag(String),
    File(PathBuf),
    Default,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Flag(flag) => write!(f, "flag {flag}"),
            Origin::File(path) => write!(f, "config file {}", path.display()),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {}: {message}", path.display())]
    File { path: PathBuf, message: String },

    #[error("invalid `{key}` ({origin}): {reason}")]
    Invalid {
        key: &'static str,
        origin: Origin,
        reason: String,
    },

    #[error("{0}")]
    Usage(String),
}

/// Layers `flags` over the parsed `file` (if any) over the defaults and
/// validates the result.
pub fn parse_config(
    flags: &ConfigOverrides,
    file: Option<(&Path, &str)>,
) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let file_values = match file {
        Some((path, text)) => {
            let values: ConfigOverrides =
                serde_json::from_str(text).map_err(|e| ConfigError::File {
                    path: path.to_path_buf(),
                    message: e.to_string(),
                })?;
            values.apply(&mut cfg);
            Some((path, values))
        }
        None => None,
    };
    flags.apply(&mut cfg);

    cfg.validate().map_err(|(key, reason)| {
        let origin = if flags.sets(key) {
            Origin::Flag(format!("--{}", key.replace('_', "-")))
        } else if let Some((path, values)) = &file_values {
            if values.sets(key) {
                Origin::File(path.to_path_buf())
            } else {
                Origin::Default
            }
        } else {
            Origin::Default
        };
        ConfigError::Invalid {
            key,
            origin,
            reason,
        }
    })?;
    Ok(cfg)
}

/// Reads `path` and resolves it together with `flags`.
pub fn load_config(flags: &ConfigOverrides, path: Option<&Path>) -> Result<RunConfig, ConfigError> {
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            parse_config(flags, Some((path, &text)))
        }
        None => parse_config(flags, None),
    }
}

type Invalid = (&'static str, String);

fn check(ok: bool, key: &'static str, reason: &str) -> Result<(), Invalid> {
    if ok {
        Ok(())
    } else {
        Err((key, reason.to_string()))
    }
}

fn unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl RunConfig {
    fn validate(&self) -> Result<(), Invalid> {
        check(self.population >= 2, "population", "must be at least 2")?;
        check(self.generations >= 1, "generations", "must be at least 1")?;
        check(
            unit(self.mutation_rate),
            "mutation_rate",
            "must lie in [0, 1]",
        )?;
        check(
            unit(self.crossover_rate),
            "crossover_rate",
            "must lie in [0, 1]",
        )?;
        check(
            self.elite_count < self.population,
            "elite_count",
            "must be below population",
        )?;
        check(
            self.stagnation_window >= 1,
            "stagnation_window",
            "must be at least 1",
        )?;
        check(
            self.stagnation_tol >= 0.0 && self.stagnation_tol.is_finite(),
            "stagnation_tol",
            "must be finite and non-negative",
        )?;
        check(self.machines >= 1, "machines", "must be at least 1")?;
        check(self.queue_depth >= 1, "queue_depth", "must be at least 1")?;
        check(
            self.w <= self.queue_depth,
            "w",
            "must not exceed queue_depth",
        )?;
        check(
            self.delta <= self.machines,
            "delta",
            "must not exceed machines",
        )?;
        check(
            self.drop_weight > 0.0 && self.drop_weight.is_finite(),
            "drop_weight",
            "must be finite and positive",
        )?;
        check(
            self.overload_weight >= 0.0 && self.overload_weight.is_finite(),
            "overload_weight",
            "must be finite and non-negative",
        )?;
        check(
            self.infeasible_row_penalty >= 0.0 && self.infeasible_row_penalty.is_finite(),
            "infeasible_row_penalty",
            "must be finite and non-negative",
        )?;
        check(self.jobs >= 1, "jobs", "must be at least 1")?;
        check(self.seeds >= 1, "seeds", "must be at least 1")?;
        check(
            unit(self.send_failure_prob),
            "send_failure_prob",
            "must lie in [0, 1]",
        )?;
        check(
            self.rebalance_interval >= 1,
            "rebalance_interval",
            "must be at least 1",
        )?;
        check(self.horizon >= 1, "horizon", "must be at least 1")?;
        Ok(())
    }

    pub fn overload(&self) -> OverloadConfig {
        OverloadConfig {
            w: self.w,
            delta: self.delta,
        }
    }

    pub fn ga_config(&self) -> GaConfig {
        GaConfig {
            population_size: self.population,
            max_generations: self.generations,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            elite_count: self.elite_count,
            stagnation_window: self.stagnation_window,
            stagnation_tol: self.stagnation_tol,
            rng_seed: self.seed,
        }
    }

    pub fn fitness_config(&self) -> SchedulerFitnessConfig {
        SchedulerFitnessConfig {
            drop_weight: self.drop_weight,
            overload_weight: self.overload_weight,
            infeasible_row_penalty: self.infeasible_row_penalty,
            overload: self.overload(),
        }
    }

    /// Static instance of `jobs` unit jobs.
    pub fn problem(&self) -> SchedulingProblem {
        SchedulingProblem {
            fitness: self.fitness_config(),
            ga: self.ga_config(),
            ..SchedulingProblem::uniform(self.jobs, self.machines, self.queue_depth)
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            machines: self.machines,
            queue_depth: self.queue_depth,
            send_failure_prob: self.send_failure_prob,
            rebalance_interval: self.rebalance_interval,
            horizon: self.horizon,
            max_recalls: self.max_recalls,
            overload: self.overload(),
            seed: self.seed,
            ga: self.ga_rebalance.then(|| self.ga_config()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = parse_config(&ConfigOverrides::default(), None).unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.ga_config().validate().unwrap();
        cfg.sim_config().validate().unwrap();
        cfg.problem().validate().unwrap();
    }

    #[test]
    fn flag_beats_file() {
        let flags = ConfigOverrides {
            seed: Some(42),
            ..Default::default()
        };
        let cfg = parse_config(
            &flags,
            Some((Path::new("run.json"), r#"{"seed": 7, "jobs": 4}"#)),
        )
        .unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.jobs, 4);
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let text = "{\n  \"seed\": 1,\n  \"sed\": 2\n}";
        let err = parse_config(
            &ConfigOverrides::default(),
            Some((Path::new("c.json"), text)),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sed") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn type_mismatch_is_reported() {
        let err = parse_config(
            &ConfigOverrides::default(),
            Some((Path::new("c.json"), r#"{"seed": "x"}"#)),
        );
        assert!(matches!(err, Err(ConfigError::File { .. })));
    }

    #[test]
    fn w_above_depth_names_w_and_file() {
        let err = parse_config(
            &ConfigOverrides::default(),
            Some((Path::new("c.json"), r#"{"w": 5, "queue_depth": 3}"#)),
        )
        .unwrap_err();
        match err {
            ConfigError::Invalid { key, origin, .. } => {
                assert_eq!(key, "w");
                assert_eq!(origin, Origin::File(PathBuf::from("c.json")));
            }
            other => panic!("{other}"),
        }
        let flags = ConfigOverrides {
            delta: Some(9),
            ..Default::default()
        };
        match parse_config(&flags, None).unwrap_err() {
            ConfigError::Invalid { key, origin, .. } => {
                assert_eq!(key, "delta");
                assert_eq!(origin, Origin::Flag("--delta".into()));
            }
            other => panic!("{other}"),
        }
    }
}
