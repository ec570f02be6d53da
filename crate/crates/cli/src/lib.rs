//! Implementation of the `fbq` command-line tool.
//!
//! Each subcommand reads an optional JSON config, applies command-line
//! overrides and writes CSV/JSON artifacts into an output directory.

pub mod args;
pub mod commands;
pub mod io;

use std::path::PathBuf;

use fbq_core::sim::{Policy, SimConfig};
use fbq_core::solvers::SolverKind;

pub use args::Cli;

/// Exit status of a failed command.
#[derive(Debug)]
pub enum CliError {
    /// Bad input, unreadable config or unwritable output. Exit code 2.
    Config(anyhow::Error),
    /// A check ran and failed. Exit code 1.
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e:#}"),
            CliError::CheckFailed(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Config(e)
    }
}

impl From<fbq_core::Error> for CliError {
    fn from(e: fbq_core::Error) -> Self {
        CliError::Config(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Rates,
    Solve { solver: SolverKind },
    Simulate,
    Sweep,
    Check,
    Bench,
}

/// Overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub horizon: Option<u64>,
    pub policies: Vec<Policy>,
    /// Arrival-rate grid as fractions `(lo, hi)` of the perfect-feedback capacity.
    pub grid: Option<(f64, f64)>,
}

impl Overrides {
    pub fn apply(&self, config: &mut SimConfig) -> CliResult<()> {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(h) = self.horizon {
            config.horizon = h;
        }
        config.validate()?;
        Ok(())
    }
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub overrides: Overrides,
    pub quiet: bool,
}

impl ExperimentSpec {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    /// Output directory, defaulting to `fbq-out`.
    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("fbq-out"))
    }
}

pub fn execute(spec: &ExperimentSpec) -> CliResult<()> {
    match &spec.command {
        Command::Rates => commands::rates::run(spec),
        Command::Solve { solver } => commands::solve::run(spec, *solver),
        Command::Simulate => commands::simulate::run(spec),
        Command::Sweep => commands::sweep::run(spec),
        Command::Check => commands::check::run(spec),
        Command::Bench => commands::bench::run(spec),
    }
}

/// Caps the rayon pool at `FBQ_THREADS` workers when set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("FBQ_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(anyhow::anyhow!("FBQ_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.into()))
}
