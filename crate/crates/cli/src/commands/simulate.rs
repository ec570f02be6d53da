use anyhow::anyhow;
use fbq_core::sim::{self, sweep, Policy, SimConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{load_json, OutDir};
use crate::{CliError, CliResult, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub policy: Policy,
    pub csv: String,
    pub mean_queue: Vec<f64>,
    pub mean_service: Vec<f64>,
    pub mean_total_queue: f64,
    pub final_half_slope: f64,
    pub stable: bool,
    pub overhead_bits_per_slot: f64,
    /// Per-band bits of the first re-allocation.
    pub first_allocation: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub config: SimConfig,
    pub runs: Vec<RunSummary>,
}

pub fn load_config(spec: &ExperimentSpec, command: &str) -> CliResult<SimConfig> {
    let path = spec
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config(anyhow!("{command} needs --config <sim.json>")))?;
    let mut config: SimConfig = load_json(path)?;
    spec.overrides.apply(&mut config)?;
    Ok(config)
}

pub fn run(spec: &ExperimentSpec) -> CliResult<()> {
    let config = load_config(spec, "simulate")?;
    let policies = if spec.overrides.policies.is_empty() {
        vec![config.policy]
    } else {
        spec.overrides.policies.clone()
    };
    let codebook = if policies.iter().all(|&p| p == Policy::PerfectFeedback) {
        None
    } else {
        Some(config.supercodebook()?)
    };
    let results = policies
        .par_iter()
        .map(|&p| sim::run_with(&config.with_policy(p), codebook.as_ref()))
        .collect::<fbq_core::Result<Vec<_>>>()?;

    let out = OutDir::create(spec.out_dir())?;
    let mut runs = Vec::with_capacity(results.len());
    for r in &results {
        let name = format!("sim_{}.csv", r.policy);
        let mut buf = Vec::new();
        r.write_csv(&mut buf)?;
        out.write(&name, &buf)?;
        let slope = sweep::final_half_slope(r);
        spec.say(format!(
            "{:<22} mean queue {:>12.3}  slope {:+.2e}  {}",
            r.policy.name(),
            r.mean_total_queue(),
            slope,
            if slope < sweep::SLOPE_THRESHOLD { "stable" } else { "unstable" }
        ));
        runs.push(RunSummary {
            policy: r.policy,
            csv: name,
            mean_queue: r.mean_queue.clone(),
            mean_service: r.mean_service.clone(),
            mean_total_queue: r.mean_total_queue(),
            final_half_slope: slope,
            stable: slope < sweep::SLOPE_THRESHOLD,
            overhead_bits_per_slot: r.overhead_bits_per_slot,
            first_allocation: r.allocations.first().cloned().unwrap_or_default(),
        });
    }
    out.write_json("simulate.json", &SimulateSummary { config, runs })?;
    Ok(())
}
