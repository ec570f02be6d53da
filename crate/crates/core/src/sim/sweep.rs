//! Arrival-rate sweeps and stability knees.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::{db_to_linear, SuperCodebook};
use crate::rates::miso::beta2;
use crate::rng;

use super::config::{Policy, SimConfig};
use super::engine::{run_with, SimResult};

/// A run is stable when no queue grows faster than this (bits per slot)
/// over the final half of the horizon.
pub const SLOPE_THRESHOLD: f64 = 1e-3;

/// Grid spacing as a fraction of the perfect-feedback capacity.
pub const GRID_STEP: f64 = 0.02;

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Largest per-user queue slope over the second half of the samples.
pub fn final_half_slope(result: &SimResult) -> f64 {
    let tail = &result.samples[result.samples.len() / 2..];
    let xs: Vec<f64> = tail.iter().map(|s| s.slot as f64).collect();
    let users = result.mean_queue.len();
    (0..users)
        .map(|u| {
            let ys: Vec<f64> = tail.iter().map(|s| s.queues[u]).collect();
            ls_slope(&xs, &ys)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn is_stable(result: &SimResult) -> bool {
    final_half_slope(result) < SLOPE_THRESHOLD
}

/// Symmetric-arrival throughput limit with perfect feedback: the weakest
/// user's summed two-tap ergodic rate over its bands.
pub fn perfect_feedback_capacity(config: &SimConfig) -> Result<f64> {
    let mut cap = f64::INFINITY;
    for (set, &db) in config.bands.iter().zip(&config.snr_db) {
        cap = cap.min(set.len() as f64 * beta2(db_to_linear(db))?);
    }
    Ok(cap)
}

/// Multiples of `GRID_STEP * capacity` whose fraction of the capacity lies
/// in `[lo, hi]`. A given multiple has the same value whatever the range.
pub fn lambda_grid(config: &SimConfig, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let cap = perfect_feedback_capacity(config)?;
    let first = (lo / GRID_STEP - 1e-9).ceil() as u64;
    let last = (hi / GRID_STEP + 1e-9).floor() as u64;
    Ok((first..=last).map(|k| cap * (k as f64 * GRID_STEP)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub slope: f64,
    pub stable: bool,
    pub mean_total_queue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySweep {
    pub policy: Policy,
    /// Last stable grid point before the first unstable one.
    pub knee: Option<f64>,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub lambda_grid: Vec<f64>,
    pub policies: Vec<PolicySweep>,
}

impl SweepReport {
    pub fn knee(&self, policy: Policy) -> Option<f64> {
        self.policies
            .iter()
            .find(|p| p.policy == policy)
            .and_then(|p| p.knee)
    }

    /// `knee(num) / knee(den)` when both exist.
    pub fn ratio(&self, num: Policy, den: Policy) -> Option<f64> {
        Some(self.knee(num)? / self.knee(den)?)
    }
}

/// Knee of a stability profile ordered by increasing arrival rate.
pub fn knee_of(points: &[SweepPoint]) -> Option<f64> {
    points
        .iter()
        .take_while(|p| p.stable)
        .last()
        .map(|p| p.lambda)
}

/// Runs every policy at every grid point. All policies at one arrival rate
/// use the same seed, derived from `config.seed` and the rate itself.
pub fn stability_sweep(
    config: &SimConfig,
    lambda_grid: &[f64],
    policies: &[Policy],
    codebook: &SuperCodebook,
) -> Result<SweepReport> {
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("lambda grid must be strictly increasing".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..policies.len())
        .flat_map(|p| (0..lambda_grid.len()).map(move |i| (p, i)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(p, i)| {
            let mut c = config.with_arrivals(lambda_grid[i]).with_policy(policies[p]);
            c.seed = rng::stream_id(&[config.seed, lambda_grid[i].to_bits()]);
            let r = run_with(&c, Some(codebook))?;
            let slope = final_half_slope(&r);
            Ok(SweepPoint {
                lambda: lambda_grid[i],
                slope,
                stable: slope < SLOPE_THRESHOLD,
                mean_total_queue: r.mean_total_queue(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let policies = policies
        .iter()
        .enumerate()
        .map(|(p, &policy)| {
            let points = results[p * lambda_grid.len()..(p + 1) * lambda_grid.len()].to_vec();
            PolicySweep {
                policy,
                knee: knee_of(&points),
                points,
            }
        })
        .collect();
    Ok(SweepReport {
        lambda_grid: lambda_grid.to_vec(),
        policies,
    })
}
