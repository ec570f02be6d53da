use anyhow::{anyhow, bail};
use fbq_core::rates::build_rate_table;
use fbq_core::solvers::{solve, SolverKind};
use fbq_core::{AllocationProblem, ChannelProfile, RateTable};
use serde::{Deserialize, Serialize};

use crate::io::{load_json, parse_json, OutDir};
use crate::{CliError, CliResult, ExperimentSpec};

/// A problem given either as an explicit rate table or as per-user rate
/// models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInput {
    pub budget: u32,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_users: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_table: Option<RateTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ChannelProfile>,
}

impl ProblemInput {
    pub fn into_problem(self) -> anyhow::Result<AllocationProblem> {
        let table = match (self.rate_table, self.profile) {
            (Some(t), None) => t,
            (None, Some(p)) => build_rate_table(&p, self.budget)?,
            _ => bail!("give exactly one of `rate_table` and `profile`"),
        };
        let p = AllocationProblem::new(self.budget, self.weights, table)?;
        if let Some(n) = self.num_users.filter(|&n| n != p.num_users()) {
            return Err(anyhow!("num_users is {n} but {} weights are given", p.num_users()));
        }
        Ok(p)
    }
}

pub const TOY_PROBLEM: &str = include_str!("../../../../configs/toy_problem.json");

pub fn load_problem(spec: &ExperimentSpec) -> anyhow::Result<AllocationProblem> {
    let input: ProblemInput = match &spec.config {
        Some(p) => load_json(p)?,
        None => parse_json(TOY_PROBLEM)?,
    };
    input.into_problem()
}

pub fn run(spec: &ExperimentSpec, solver: SolverKind) -> CliResult<()> {
    if spec.config.is_none() {
        return Err(CliError::Config(anyhow!("solve needs --config <problem.json>")));
    }
    let problem = load_problem(spec)?;
    let solution = solve(&problem, solver)?;
    let text = serde_json::to_string_pretty(&solution).map_err(anyhow::Error::from)?;
    if let Some(dir) = &spec.out {
        OutDir::create(dir.clone())?.write("solution.json", format!("{text}\n").as_bytes())?;
    }
    if !spec.quiet || spec.out.is_none() {
        println!("{text}");
    }
    Ok(())
}
