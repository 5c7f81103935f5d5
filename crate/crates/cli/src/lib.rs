//! Experiment driver for the `loadmatch` binary.

pub mod commands;
pub mod config;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "loadmatch", version, about = "Balanced loads and partial recovery for correlated random graphs")]
pub struct Cli {
    /// Root seed for all randomness.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Existing directory receiving output files.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Flat JSON configuration; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical load distribution of G(n, λ/n) with fixed-point anchors.
    MuLambda(#[command(flatten)] ExperimentConfig),
    /// Runs the iterative matching algorithm on sampled pairs.
    Recover(#[command(flatten)] ExperimentConfig),
    /// Exact posterior over matchings for one sampled pair.
    Posterior(#[command(flatten)] ExperimentConfig),
    /// Samples one correlated pair.
    Sample(#[command(flatten)] ExperimentConfig),
    /// Runs a module's invariant suite.
    Verify {
        /// One of balance, orbits, model, recovery, limit.
        suite: String,
        #[command(flatten)]
        params: ExperimentConfig,
    },
    /// Checks the admissibility conditions on a graph.
    AdmissibleCheck(#[command(flatten)] ExperimentConfig),
    /// Checks the edge-expansion event on a graph.
    EventD(#[command(flatten)] ExperimentConfig),
}

/// Parses nothing; runs an already parsed invocation.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let globals = ExperimentConfig {
        seed: cli.seed,
        out: cli.out.clone(),
        threads: cli.threads,
        ..Default::default()
    };
    let merge = |flags: &ExperimentConfig| base.clone().overlay(flags).overlay(&globals);
    let cfg = match &cli.command {
        Command::MuLambda(c)
        | Command::Recover(c)
        | Command::Posterior(c)
        | Command::Sample(c)
        | Command::AdmissibleCheck(c)
        | Command::EventD(c) => merge(c),
        Command::Verify { params, .. } => merge(params),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::MuLambda(_) => commands::mu_lambda(cfg),
        Command::Recover(_) => commands::recover(cfg),
        Command::Posterior(_) => commands::posterior(cfg),
        Command::Sample(_) => commands::sample(cfg),
        Command::Verify { suite, .. } => verify::run_verify(suite, cfg),
        Command::AdmissibleCheck(_) => commands::admissible_check(cfg),
        Command::EventD(_) => commands::event_d(cfg),
    })
}
