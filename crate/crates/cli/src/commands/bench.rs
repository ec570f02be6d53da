use fbq_core::rates::{miso_table, MisoModel};
use fbq_core::rng;
use fbq_core::solvers::{dp_op_count, dp_solve, greedy_solve, relaxation_solve_miso};
use fbq_core::AllocationProblem;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::io::OutDir;
use crate::{CliResult, ExperimentSpec};

/// Sizes that are actually solved.
pub const MEASURED_SIZES: [(u64, u64); 3] = [(4, 12), (8, 12), (50, 50)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpCountRow {
    pub num_users: u64,
    pub budget: u64,
    /// `L (B + 1)(B + 2) / 2`.
    pub dp_formula: u64,
    pub dp_measured: Option<u64>,
    /// `(B + L) log2 L`.
    pub greedy_bound: f64,
    pub greedy_extractions: Option<u64>,
    /// `L log2 L`.
    pub relaxation_bound: f64,
    pub relaxation_probes: Option<u64>,
}

/// Counts for the 10 MHz LTE example: `L = K = 50`, 4-bit tables and a
/// budget of `B = 4 c L` bits with `c = K / 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LteCounts {
    pub num_blocks: u64,
    pub num_users: u64,
    pub budget: u64,
    pub dp_ops: u64,
    pub dp_ops_reported: f64,
    pub greedy_ops: f64,
    pub greedy_ops_reported: f64,
    pub relaxation_ops: f64,
    pub relaxation_ops_reported: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmRow {
    pub algorithm: String,
    pub structure: String,
    pub complexity: String,
    pub factor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub op_counts: Vec<OpCountRow>,
    pub lte: LteCounts,
    pub algorithms: Vec<AlgorithmRow>,
}

fn log2_count(n: u64, m: u64) -> f64 {
    (n + m) as f64 * (m as f64).log2()
}

/// Random MISO instance with SNRs in [-15, 15] dB and weights in [0.1, 10).
pub fn random_miso_problem(l: u64, b: u64, seed: u64) -> fbq_core::Result<(Vec<MisoModel>, AllocationProblem)> {
    let mut r = rng::stream(seed, rng::stream_id(&[l, b]));
    let models = (0..l)
        .map(|_| MisoModel::from_db(r.random_range(-15.0..=15.0)))
        .collect::<fbq_core::Result<Vec<_>>>()?;
    let weights: Vec<f64> = (0..l).map(|_| r.random_range(0.1..10.0)).collect();
    let table = miso_table(&models, b as u32)?;
    Ok((models, AllocationProblem::new(b as u32, weights, table)?))
}

pub fn measure(l: u64, b: u64, seed: u64) -> fbq_core::Result<OpCountRow> {
    let (models, p) = random_miso_problem(l, b, seed)?;
    let (_, trace) = dp_solve(&p);
    let g = greedy_solve(&p);
    let r = relaxation_solve_miso(&models, p.weights(), p.budget())?;
    Ok(OpCountRow {
        num_users: l,
        budget: b,
        dp_formula: dp_op_count(l, b),
        dp_measured: Some(trace.op_count),
        greedy_bound: log2_count(b, l),
        greedy_extractions: Some(g.extractions),
        relaxation_bound: l as f64 * (l as f64).log2(),
        relaxation_probes: Some(r.probes),
    })
}

pub fn lte_counts() -> LteCounts {
    let (blocks, users) = (50u64, 50u64);
    // c = K / 4 users with full 4-bit feedback on every block.
    let budget = 4 * blocks * users / 4;
    LteCounts {
        num_blocks: blocks,
        num_users: users,
        budget,
        dp_ops: dp_op_count(blocks, budget),
        dp_ops_reported: 7e11,
        greedy_ops: log2_count(budget, blocks),
        greedy_ops_reported: 15e3,
        relaxation_ops: blocks as f64 * (blocks as f64).log2(),
        relaxation_ops_reported: 300.0,
    }
}

pub fn algorithm_table() -> Vec<AlgorithmRow> {
    let row = |a: &str, s: &str, c: &str, f: &str| AlgorithmRow {
        algorithm: a.into(),
        structure: s.into(),
        complexity: c.into(),
        factor: f.into(),
    };
    vec![
        row("dynamic programming", "none", "O(L B^2)", "1"),
        row("greedy", "non-decreasing, submodular", "O((B + L) log2 L)", "1 - 1/e"),
        row(
            "convex relaxation",
            "non-decreasing, submodular, MISO RVQ",
            "O(L log2 L)",
            "1/2",
        ),
    ]
}

pub fn report(seed: u64) -> fbq_core::Result<BenchReport> {
    let mut op_counts = MEASURED_SIZES
        .iter()
        .map(|&(l, b)| measure(l, b, seed))
        .collect::<fbq_core::Result<Vec<_>>>()?;
    let lte = lte_counts();
    op_counts.push(OpCountRow {
        num_users: lte.num_blocks,
        budget: lte.budget,
        dp_formula: lte.dp_ops,
        dp_measured: None,
        greedy_bound: lte.greedy_ops,
        greedy_extractions: None,
        relaxation_bound: lte.relaxation_ops,
        relaxation_probes: None,
    });
    Ok(BenchReport {
        seed,
        op_counts,
        lte,
        algorithms: algorithm_table(),
    })
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

pub fn run(spec: &ExperimentSpec) -> CliResult<()> {
    let rep = report(spec.overrides.seed.unwrap_or(1))?;
    let out = OutDir::create(spec.out_dir())?;
    out.write_csv("op_counts.csv", |w| {
        w.write_record([
            "num_users",
            "budget",
            "dp_formula",
            "dp_measured",
            "greedy_bound",
            "greedy_extractions",
            "relaxation_bound",
            "relaxation_probes",
        ])?;
        for r in &rep.op_counts {
            w.write_record([
                r.num_users.to_string(),
                r.budget.to_string(),
                r.dp_formula.to_string(),
                opt(&r.dp_measured),
                r.greedy_bound.to_string(),
                opt(&r.greedy_extractions),
                r.relaxation_bound.to_string(),
                opt(&r.relaxation_probes),
            ])?;
        }
        Ok(())
    })?;
    out.write_json("bench.json", &rep)?;

    spec.say(format!(
        "{:>5} {:>6} {:>14} {:>14} {:>12} {:>8}",
        "L", "B", "dp formula", "dp measured", "greedy bound", "greedy"
    ));
    for r in &rep.op_counts {
        spec.say(format!(
            "{:>5} {:>6} {:>14} {:>14} {:>12.0} {:>8}",
            r.num_users,
            r.budget,
            r.dp_formula,
            opt(&r.dp_measured),
            r.greedy_bound,
            opt(&r.greedy_extractions)
        ));
    }
    let l = &rep.lte;
    spec.say(format!(
        "LTE example (B = {}): dp {} ops (quoted {:e}), greedy {:.0} (quoted {:e}), relaxation {:.0} (quoted {})",
        l.budget, l.dp_ops, l.dp_ops_reported, l.greedy_ops, l.greedy_ops_reported, l.relaxation_ops, l.relaxation_ops_reported
    ));
    for a in &rep.algorithms {
        spec.say(format!("{:<20} {:<40} {:<20} {}", a.algorithm, a.structure, a.complexity, a.factor));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measured_counts_match_formula() {
        let rep = report(3).unwrap();
        for r in &rep.op_counts[..3] {
            assert_eq!(r.dp_measured, Some(r.dp_formula));
            assert!(r.greedy_extractions.unwrap() <= r.budget);
        }
        assert_eq!(rep.op_counts[2].dp_formula, 66_300);
    }

    #[test]
    fn lte_budget() {
        let l = lte_counts();
        assert_eq!(l.budget, 2500);
        assert_eq!(l.dp_ops, 50 * 2501 * 2502 / 2);
    }
}
