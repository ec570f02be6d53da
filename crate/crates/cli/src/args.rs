use std::path::PathBuf;

use clap::{Parser, Subcommand};
use fbq_core::sim::Policy;
use fbq_core::solvers::SolverKind;

use crate::{Command, ExperimentSpec, Overrides};

#[derive(Debug, Parser)]
#[command(name = "fbq", version, about = "Feedback-bit allocation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Comma-separated policy names.
    #[arg(long, global = true, value_delimiter = ',')]
    pub policy: Vec<Policy>,

    /// Overrides the simulated horizon in slots.
    #[arg(long, global = true)]
    pub horizon: Option<u64>,

    /// Arrival-rate grid `lo:hi` as fractions of the perfect-feedback capacity.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<(f64, f64)>,

    /// Suppress progress and summaries on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Beta-ratio curve and analytic-vs-Monte-Carlo RVQ rates.
    Rates,
    /// Solve one allocation problem.
    Solve {
        #[arg(long, default_value = "dp")]
        solver: SolverKind,
    },
    /// Simulate queues under one or more policies.
    Simulate,
    /// Stability sweep over arrival rates.
    Sweep,
    /// Cross-check solvers and invariants on a problem.
    Check,
    /// Operation-count table.
    Bench,
}

fn parse_grid(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected `lo:hi`")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(format!("need 0 < lo <= hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

impl Cli {
    pub fn into_spec(self) -> ExperimentSpec {
        let command = match self.command {
            Sub::Rates => Command::Rates,
            Sub::Solve { solver } => Command::Solve { solver },
            Sub::Simulate => Command::Simulate,
            Sub::Sweep => Command::Sweep,
            Sub::Check => Command::Check,
            Sub::Bench => Command::Bench,
        };
        ExperimentSpec {
            command,
            config: self.config,
            out: self.out,
            overrides: Overrides {
                seed: self.seed,
                horizon: self.horizon,
                policies: self.policy,
                grid: self.grid,
            },
            quiet: self.quiet,
        }
    }
}
