//! The `gasched` command line.
//!
//! Exit status: 0 on success, 1 when `oracle-check` finds the optimizer short
//! of the exhaustive optimum, 2 on configuration or input errors.

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{load_config, ConfigError, ConfigOverrides, OutputFormat, RunConfig};
use crate::oracle::{brute_force_best, OracleResult};
use crate::scheduler::{dropped_jobs, optimize_schedule};
use crate::sim::{parse_workload, run_sim_traced, SimMetrics};
use crate::{Error, JobId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "gasched",
    version,
    about = "Genetic job placement over a binary schedule matrix"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub overrides: ConfigOverrides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Optimize a static instance of `--jobs` unit jobs.
    Optimize,
    /// Run the queue simulator on `--workload`.
    Simulate,
    /// Compare the optimizer with exhaustive search over `--seeds` seeds.
    OracleCheck,
    /// Print the resolved configuration (the default).
    PrintConfig,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Optimize => "optimize",
            Command::Simulate => "simulate",
            Command::OracleCheck => "oracle-check",
            Command::PrintConfig => "print-config",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Run { context: String, source: Error },
}

/// Output document and its CSV companion.
struct Output {
    json: String,
    csv: String,
    matrix: Option<String>,
    exit: i32,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct OptimizeBody {
    best_fitness: f64,
    unpolished_fitness: f64,
    dropped_jobs: Vec<JobId>,
    column_loads: Vec<usize>,
    history: Vec<f64>,
    matrix: String,
}

#[derive(Serialize)]
struct SweepRun {
    seed: u64,
    fitness: f64,
}

#[derive(Serialize)]
struct OracleBody {
    oracle: OracleResult,
    ga_best: f64,
    hits: usize,
    runs: Vec<SweepRun>,
    #[serde(rename = "match")]
    matched: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gasched: {e}");
            EXIT_CONFIG
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let command = cli.command.unwrap_or(Command::PrintConfig);
    let cfg = load_config(&cli.overrides, cli.config.as_deref())?;
    let output = match command {
        Command::PrintConfig => print_config(&cfg),
        Command::Optimize => optimize(&cfg)?,
        Command::Simulate => simulate(&cfg)?,
        Command::OracleCheck => oracle_check(&cfg)?,
    };
    emit(&cfg, &output)?;
    Ok(output.exit)
}

fn to_json<T: Serialize>(command: Command, cfg: &RunConfig, body: T) -> String {
    let doc = Envelope {
        command: command.name(),
        seed: cfg.seed,
        config: cfg,
        body,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("documents serialize");
    text.push('\n');
    text
}

fn run_err(context: &str) -> impl FnOnce(Error) -> CliError + '_ {
    move |source| CliError::Run {
        context: context.to_string(),
        source,
    }
}

fn print_config(cfg: &RunConfig) -> Output {
    let value = serde_json::to_value(cfg).expect("config serializes");
    let mut csv = String::from("key,value\n");
    if let serde_json::Value::Object(map) = &value {
        for (k, v) in map {
            writeln!(csv, "{k},{v}").unwrap();
        }
    }
    Output {
        json: to_json(Command::PrintConfig, cfg, serde_json::json!({})),
        csv,
        matrix: None,
        exit: EXIT_OK,
    }
}

fn optimize(cfg: &RunConfig) -> Result<Output, CliError> {
    let outcome = optimize_schedule(&cfg.problem()).map_err(run_err("optimize"))?;
    let mut csv = String::from("generation,best_fitness\n");
    for (g, f) in outcome.history.iter().enumerate() {
        writeln!(csv, "{g},{f}").unwrap();
    }
    let snapshot = outcome.matrix.to_snapshot();
    let body = OptimizeBody {
        best_fitness: outcome.fitness,
        unpolished_fitness: outcome.unpolished_fitness,
        dropped_jobs: dropped_jobs(&outcome.matrix),
        column_loads: outcome.matrix.column_loads(),
        history: outcome.history,
        matrix: snapshot.clone(),
    };
    Ok(Output {
        json: to_json(Command::Optimize, cfg, body),
        csv,
        matrix: Some(snapshot),
        exit: EXIT_OK,
    })
}

fn simulate(cfg: &RunConfig) -> Result<Output, CliError> {
    let workload = match &cfg.workload {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_workload(&text).map_err(|source| CliError::Run {
                context: format!("workload {}", path.display()),
                source,
            })?
        }
        None => Vec::new(),
    };
    let report = run_sim_traced(&cfg.sim_config(), &workload).map_err(run_err("simulate"))?;
    let csv = report.trace_csv();
    let metrics: SimMetrics = report.metrics;
    Ok(Output {
        json: to_json(Command::Simulate, cfg, metrics),
        csv,
        matrix: None,
        exit: EXIT_OK,
    })
}

fn oracle_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let fitness = cfg.fitness_config();
    let oracle = brute_force_best(cfg.jobs, cfg.machines, cfg.queue_depth, &fitness)
        .map_err(run_err("oracle"))?;
    let runs = (0..cfg.seeds)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let mut problem = cfg.problem();
            problem.ga.rng_seed = seed;
            optimize_schedule(&problem).map(|o| SweepRun {
                seed,
                fitness: o.fitness,
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(run_err("optimize"))?;
    let ga_best = runs.iter().map(|r| r.fitness).fold(f64::INFINITY, f64::min);
    let hits = runs.iter().filter(|r| r.fitness == oracle.optimum).count();
    let matched = ga_best == oracle.optimum;
    let mut csv = String::from("seed,fitness\n");
    for r in &runs {
        writeln!(csv, "{},{}", r.seed, r.fitness).unwrap();
    }
    let body = OracleBody {
        oracle,
        ga_best,
        hits,
        runs,
        matched,
    };
    Ok(Output {
        json: to_json(Command::OracleCheck, cfg, body),
        csv,
        matrix: None,
        exit: if matched { EXIT_OK } else { EXIT_MISMATCH },
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(cfg: &RunConfig, output: &Output) -> Result<(), CliError> {
    match &cfg.out {
        Some(out) => {
            match cfg.format {
                OutputFormat::Json => write_file(out, &output.json)?,
                OutputFormat::Csv => write_file(out, &output.csv)?,
                OutputFormat::Both => {
                    write_file(out, &output.json)?;
                    write_file(&out.with_extension("csv"), &output.csv)?;
                }
            }
            if let Some(matrix) = &output.matrix {
                write_file(&out.with_extension("matrix"), matrix)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let text = match cfg.format {
                OutputFormat::Json => output.json.clone(),
                OutputFormat::Csv => output.csv.clone(),
                OutputFormat::Both => format!("{}{}", output.json, output.csv),
            };
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
    }
    Ok(())
}
