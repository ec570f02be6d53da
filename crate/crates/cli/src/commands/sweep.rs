use std::collections::BTreeMap;

use fbq_core::sim::{overhead_estimate, stability_sweep, sweep, Policy, SweepReport};
use serde::{Deserialize, Serialize};

use super::simulate::load_config;
use crate::io::OutDir;
use crate::{CliResult, ExperimentSpec};

/// Signalling overhead quoted for the reference setup, bits per slot.
pub const REPORTED_OVERHEAD: f64 = 0.88;

pub const DEFAULT_GRID: (f64, f64) = (0.5, 1.1);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overhead {
    /// `log2 C(B + L - 1, L - 1) / T`.
    pub computed: f64,
    pub reported: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub capacity: f64,
    pub grid_fractions: (f64, f64),
    pub grid_step: f64,
    pub knees: BTreeMap<String, Option<f64>>,
    /// Knee over the perfect-feedback capacity.
    pub knee_fractions: BTreeMap<String, Option<f64>>,
    /// `"a/b"` is the knee of `a` over the knee of `b`.
    pub ratios: BTreeMap<String, Option<f64>>,
    pub overhead: Overhead,
    pub report: SweepReport,
}

pub fn summarize(
    report: SweepReport,
    capacity: f64,
    grid: (f64, f64),
    overhead: f64,
) -> SweepSummary {
    let policies: Vec<Policy> = report.policies.iter().map(|p| p.policy).collect();
    let mut knees = BTreeMap::new();
    let mut knee_fractions = BTreeMap::new();
    let mut ratios = BTreeMap::new();
    for &p in &policies {
        let k = report.knee(p);
        knees.insert(p.to_string(), k);
        knee_fractions.insert(p.to_string(), k.map(|k| k / capacity));
        for base in [Policy::EqualStatic, Policy::PerfectFeedback] {
            if p != base && policies.contains(&base) {
                ratios.insert(format!("{p}/{base}"), report.ratio(p, base));
            }
        }
    }
    SweepSummary {
        capacity,
        grid_fractions: grid,
        grid_step: sweep::GRID_STEP,
        knees,
        knee_fractions,
        ratios,
        overhead: Overhead {
            computed: overhead,
            reported: REPORTED_OVERHEAD,
        },
        report,
    }
}

pub fn run(spec: &ExperimentSpec) -> CliResult<()> {
    let config = load_config(spec, "sweep")?;
    let policies = if spec.overrides.policies.is_empty() {
        Policy::ALL.to_vec()
    } else {
        spec.overrides.policies.clone()
    };
    let grid = spec.overrides.grid.unwrap_or(DEFAULT_GRID);
    let lambdas = sweep::lambda_grid(&config, grid.0, grid.1)?;
    let capacity = sweep::perfect_feedback_capacity(&config)?;
    let codebook = config.supercodebook()?;
    spec.say(format!(
        "sweeping {} policies over {} arrival rates ({:.4}..{:.4})",
        policies.len(),
        lambdas.len(),
        lambdas.first().copied().unwrap_or(0.0),
        lambdas.last().copied().unwrap_or(0.0)
    ));
    let report = stability_sweep(&config, &lambdas, &policies, &codebook)?;
    let overhead = overhead_estimate(config.budget, config.num_bands, config.period);
    let summary = summarize(report, capacity, grid, overhead);
    for (name, frac) in &summary.knee_fractions {
        let shown = frac.map_or("none".to_string(), |f| format!("{f:.2}"));
        spec.say(format!("{name:<22} knee/capacity {shown}"));
    }
    for (name, r) in &summary.ratios {
        spec.say(format!("{name:<40} {}", r.map_or("n/a".to_string(), |r| format!("{r:.4}"))));
    }
    spec.say(format!(
        "overhead {:.3} bits/slot computed, {REPORTED_OVERHEAD} reported",
        summary.overhead.computed
    ));
    OutDir::create(spec.out_dir())?.write_json("sweep.json", &summary)?;
    Ok(())
}
