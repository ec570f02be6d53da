//! Continuous water-filling relaxation and floor rounding.
//!
//! Minimises `sum_k q_k c_k 2^{-b_k}` over real `b_k >= 0` with
//! `sum_k b_k = B`. With `theta_k = q_k c_k ln 2`, the KKT point is
//! `b_k = [log2(theta_k / eta)]^+` for a water level `eta` fixed by the
//! budget. Sorting the `theta_k` and binary-searching the active set gives
//! `eta` in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::FractionalAllocation;
use crate::rates::MisoModel;

/// Bits within this distance below an integer are treated as that integer
/// when rounding.
pub const ROUNDING_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationOutcome {
    pub fractional: FractionalAllocation,
    /// `theta_k = q_k c_k ln 2`.
    pub theta: Vec<f64>,
    /// Feasibility probes made by the active-set search.
    pub probes: u64,
}

/// Water-filling over per-user loss coefficients `coeffs` (the factor in
/// front of `2^{-b_k}`) and weights.
pub fn relaxation_solve(coeffs: &[f64], weights: &[f64], budget: u32) -> Result<RelaxationOutcome> {
    if coeffs.len() != weights.len() {
        return Err(Error::InvalidProblem(format!(
            "{} coefficients for {} weights",
            coeffs.len(),
            weights.len()
        )));
    }
    if let Some(k) = coeffs
        .iter()
        .chain(weights)
        .position(|v| !v.is_finite() || *v < 0.0)
    {
        return Err(Error::InvalidProblem(format!("entry {k} is negative or not finite")));
    }
    let theta: Vec<f64> = coeffs
        .iter()
        .zip(weights)
        .map(|(c, q)| q * c * std::f64::consts::LN_2)
        .collect();
    let max_theta = theta.iter().copied().fold(0.0, f64::max);
    if max_theta <= 0.0 {
        return Err(Error::Degenerate("every q_k c_k is zero".into()));
    }
    if budget == 0 {
        return Ok(RelaxationOutcome {
            fractional: FractionalAllocation {
                bits: vec![0.0; theta.len()],
                eta: max_theta,
            },
            theta,
            probes: 0,
        });
    }

    let mut order: Vec<usize> = (0..theta.len()).filter(|&k| theta[k] > 0.0).collect();
    order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]).then(a.cmp(&b)));
    let logs: Vec<f64> = order.iter().map(|&k| theta[k].log2()).collect();
    let mut prefix = Vec::with_capacity(logs.len() + 1);
    prefix.push(0.0);
    for l in &logs {
        prefix.push(prefix.last().unwrap() + l);
    }
    // Bits spent if the water level sits at the j-th largest theta.
    let spent_at = |j: usize| prefix[j] - j as f64 * logs[j];

    let b = budget as f64;
    let (mut lo, mut hi) = (0usize, logs.len());
    let mut probes = 0u64;
    // Invariant: spent_at(j) < B for j < lo, >= B for j >= hi.
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        probes += 1;
        if spent_at(mid) < b {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let active = lo;
    let log_eta = (prefix[active] - b) / active as f64;

    let mut bits = vec![0.0; theta.len()];
    for (&k, &l) in order.iter().zip(&logs).take(active) {
        bits[k] = (l - log_eta).max(0.0);
    }
    Ok(RelaxationOutcome {
        fractional: FractionalAllocation {
            bits,
            eta: log_eta.exp2(),
        },
        theta,
        probes,
    })
}

/// `floor(b)` when `b >= 1`, else 0.
pub fn round_allocation(frac: &FractionalAllocation) -> Vec<u32> {
    frac.bits
        .iter()
        .map(|&b| {
            let snapped = (b + ROUNDING_SNAP).floor();
            if snapped >= 1.0 {
                snapped as u32
            } else {
                0
            }
        })
        .collect()
}

/// Relaxation of the MISO objective `sum q_k [beta2 - (beta2 - beta1) 2^{-b_k}]`.
pub fn relaxation_solve_miso(models: &[MisoModel], weights: &[f64], budget: u32) -> Result<RelaxationOutcome> {
    let coeffs: Vec<f64> = models.iter().map(MisoModel::loss_coefficient).collect();
    relaxation_solve(&coeffs, weights, budget)
}

/// Optimality residuals of a relaxation output, relative to the water level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    /// `|sum b_k - B|`.
    pub budget: f64,
    /// Largest `|theta_k 2^{-b_k} - eta| / eta` over users with `b_k > 0`.
    pub stationarity: f64,
    /// Largest `max(theta_k - eta, 0) / eta` over users with `b_k = 0`.
    pub slackness: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.budget.max(self.stationarity).max(self.slackness)
    }
}

pub fn kkt_residuals(out: &RelaxationOutcome, budget: u32) -> KktResiduals {
    let f = &out.fractional;
    let mut r = KktResiduals {
        budget: (f.total_bits() - budget as f64).abs(),
        stationarity: 0.0,
        slackness: 0.0,
    };
    for (&b, &theta) in f.bits.iter().zip(&out.theta) {
        if b > 0.0 {
            r.stationarity = r.stationarity.max((theta * (-b).exp2() - f.eta).abs() / f.eta);
        } else {
            r.slackness = r.slackness.max((theta - f.eta).max(0.0) / f.eta);
        }
    }
    r
}

/// `min{1/2, 1 / (max_ratio / 2 + 1)}`.
pub fn approximation_factor_from_ratio(max_ratio: f64) -> f64 {
    0.5f64.min(1.0 / (0.5 * max_ratio + 1.0))
}

/// Per-instance guarantee of relaxation plus rounding for users at `snrs`
/// (linear average SNRs).
pub fn approximation_factor_bound(snrs: &[f64]) -> Result<f64> {
    let mut max_ratio: f64 = 0.0;
    for &s in snrs {
        max_ratio = max_ratio.max(MisoModel::new(s)?.ratio());
    }
    Ok(approximation_factor_from_ratio(max_ratio))
}

/// Continuous MISO objective at real-valued bits.
pub fn miso_objective(models: &[MisoModel], weights: &[f64], bits: &[f64]) -> f64 {
    models
        .iter()
        .zip(weights)
        .zip(bits)
        .map(|((m, q), &b)| q * m.rate_at(b))
        .sum()
}
