//! Allocation algorithms and a common result envelope.

pub mod brute;
pub mod dp;
pub mod greedy;
pub mod relax;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Allocation, AllocationProblem};

pub use brute::brute_force_solve;
pub use dp::{dp_op_count, dp_solve, DpTrace};
pub use greedy::{greedy_solve, GreedyOutcome};
pub use relax::{
    approximation_factor_bound, approximation_factor_from_ratio, kkt_residuals, relaxation_solve,
    relaxation_solve_miso, round_allocation, KktResiduals, RelaxationOutcome,
};

/// `1 - 1/e`.
pub const GREEDY_FACTOR: f64 = 1.0 - 1.0 / std::f64::consts::E;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Dp,
    Greedy,
    Relaxation,
    BruteForce,
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp" => Ok(Self::Dp),
            "greedy" => Ok(Self::Greedy),
            "relaxation" => Ok(Self::Relaxation),
            "brute-force" => Ok(Self::BruteForce),
            other => Err(Error::Config(format!("unknown solver `{other}`"))),
        }
    }
}

/// What the solver can promise about its answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Guaranteed fraction of the optimum (1 for exact solvers).
    pub bound_used: f64,
    /// Inner-loop work: DP max evaluations, greedy heap extractions,
    /// relaxation search probes, or allocations enumerated.
    pub op_count: u64,
    /// Whether the structural preconditions of `bound_used` were met.
    pub guaranteed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub bits: Vec<u32>,
    pub objective: f64,
    pub certificate: Certificate,
}

impl Solution {
    fn new(allocation: Allocation, certificate: Certificate) -> Self {
        Self {
            bits: allocation.bits,
            objective: allocation.objective,
            certificate,
        }
    }
}

/// Per-user `(beta1, beta2)` read back from a table of the form
/// `beta2 (1 - 2^{-b}) + beta1 2^{-b}`, if every entry fits to `1e-9`.
pub fn miso_shape(problem: &AllocationProblem) -> Option<Vec<(f64, f64)>> {
    if problem.budget() == 0 {
        return None;
    }
    let table = problem.rate_table();
    (0..problem.num_users())
        .map(|k| {
            let row = table.row(k);
            let b1 = row[0];
            let b2 = 2.0 * row[1] - row[0];
            let fits = row.iter().enumerate().all(|(j, &v)| {
                let f = 2f64.powi(-(j as i32));
                (b2 * (1.0 - f) + b1 * f - v).abs() <= 1e-9 * (1.0 + v.abs())
            });
            (fits && b1 > 0.0 && b2 >= b1).then_some((b1, b2))
        })
        .collect()
}

/// Relaxation plus rounding on a rate table, reading the `2^{-b}` loss
/// coefficient off the first two columns.
fn relaxation_on_table(problem: &AllocationProblem) -> Result<Solution> {
    if problem.budget() == 0 || problem.num_users() == 0 {
        return Ok(Solution::new(
            Allocation::zeros(problem),
            Certificate {
                bound_used: 1.0,
                op_count: 0,
                guaranteed: true,
            },
        ));
    }
    let table = problem.rate_table();
    let coeffs: Vec<f64> = (0..problem.num_users())
        .map(|k| (2.0 * (table.rate(k, 1) - table.rate(k, 0))).max(0.0))
        .collect();
    let shape = miso_shape(problem);
    let out = relaxation_solve(&coeffs, problem.weights(), problem.budget())?;
    let bits = round_allocation(&out.fractional);
    let (bound_used, guaranteed) = match &shape {
        Some(betas) => {
            let max_ratio = betas.iter().map(|(b1, b2)| b2 / b1).fold(0.0, f64::max);
            (approximation_factor_from_ratio(max_ratio), true)
        }
        None => (0.0, false),
    };
    Ok(Solution::new(
        Allocation::evaluate(problem, bits)?,
        Certificate {
            bound_used,
            op_count: out.probes,
            guaranteed,
        },
    ))
}

pub fn solve(problem: &AllocationProblem, kind: SolverKind) -> Result<Solution> {
    match kind {
        SolverKind::Dp => {
            let (alloc, trace) = dp_solve(problem);
            Ok(Solution::new(
                alloc,
                Certificate {
                    bound_used: 1.0,
                    op_count: trace.op_count,
                    guaranteed: true,
                },
            ))
        }
        SolverKind::BruteForce => {
            let alloc = brute_force_solve(problem)?;
            let count = (0..=problem.budget() as u64)
                .map(|b| brute::allocation_count(problem.num_users() as u64, b))
                .sum::<u128>();
            Ok(Solution::new(
                alloc,
                Certificate {
                    bound_used: 1.0,
                    op_count: count as u64,
                    guaranteed: true,
                },
            ))
        }
        SolverKind::Greedy => {
            let out = greedy_solve(problem);
            Ok(Solution::new(
                out.allocation,
                Certificate {
                    bound_used: if out.guaranteed { GREEDY_FACTOR } else { 0.0 },
                    op_count: out.extractions,
                    guaranteed: out.guaranteed,
                },
            ))
        }
        SolverKind::Relaxation => relaxation_on_table(problem),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{build_rate_table, ChannelProfile};

    #[test]
    fn miso_table_is_recognised() {
        let t = build_rate_table(&ChannelProfile::miso_db(&[-5.0, 5.0, 12.0]), 6).unwrap();
        let p = AllocationProblem::new(6, vec![1.0, 2.0, 0.5], t).unwrap();
        let shape = miso_shape(&p).unwrap();
        let m = crate::rates::MisoModel::from_db(5.0).unwrap();
        assert!((shape[1].0 - m.beta1).abs() < 1e-12);
        assert!((shape[1].1 - m.beta2).abs() < 1e-12);
        let sol = solve(&p, SolverKind::Relaxation).unwrap();
        assert!(sol.certificate.guaranteed);
        assert_eq!(sol.certificate.bound_used, 0.5);
        assert!(sol.bits.iter().sum::<u32>() <= 6);
    }

    #[test]
    fn non_miso_table_is_unguaranteed() {
        let t = crate::problem::RateTable::new(vec![vec![0.0, 1.0, 1.5], vec![0.0, 0.9, 1.35]]).unwrap();
        let p = AllocationProblem::new(2, vec![1.0, 1.0], t).unwrap();
        let sol = solve(&p, SolverKind::Relaxation).unwrap();
        assert!(!sol.certificate.guaranteed);
    }

    #[test]
    fn solver_names() {
        assert_eq!("dp".parse::<SolverKind>().unwrap(), SolverKind::Dp);
        assert_eq!("brute-force".parse::<SolverKind>().unwrap(), SolverKind::BruteForce);
        assert!("simplex".parse::<SolverKind>().is_err());
    }

    #[test]
    fn envelope_json_shape() {
        let t = crate::problem::RateTable::new(vec![vec![0.0, 1.0, 1.5], vec![0.0, 0.9, 1.35]]).unwrap();
        let p = AllocationProblem::new(2, vec![1.0, 1.0], t).unwrap();
        let v = serde_json::to_value(solve(&p, SolverKind::Greedy).unwrap()).unwrap();
        assert_eq!(v["bits"], serde_json::json!([1, 1]));
        assert_eq!(v["certificate"]["op_count"], 2);
        assert_eq!(v["certificate"]["guaranteed"], true);
    }
}
