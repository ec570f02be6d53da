use fbq_core::problem::{virtualize, Assignment};
use fbq_core::rates::{beta_ratio_curve, MisoModel};
use fbq_core::sim::{self, CodebookParams, Policy, SimConfig};
use fbq_core::solvers::{
    brute, brute_force_solve, dp_op_count, dp_solve, greedy_solve, kkt_residuals, miso_shape,
    relaxation_solve, round_allocation, GREEDY_FACTOR,
};
use fbq_core::{weighted_sum_rate, AllocationProblem};
use serde::{Deserialize, Serialize};

use super::solve::load_problem;
use crate::io::OutDir;
use crate::{CliError, CliResult, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn item(name: &str, passed: bool, detail: String) -> CheckItem {
    CheckItem {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Solver cross-checks on one problem.
pub fn problem_checks(p: &AllocationProblem) -> fbq_core::Result<Vec<CheckItem>> {
    let mut items = Vec::new();
    let (l, b) = (p.num_users() as u64, p.budget() as u64);
    let (dp, trace) = dp_solve(p);

    let feasible = (0..=b).map(|j| brute::allocation_count(l, j)).sum::<u128>();
    if feasible <= brute::BRUTE_FORCE_LIMIT {
        let bf = brute_force_solve(p)?;
        items.push(item(
            "dp-matches-brute-force",
            close(dp.objective, bf.objective, 1e-12),
            format!("dp {} brute force {}", dp.objective, bf.objective),
        ));
    } else {
        items.push(item("dp-matches-brute-force", true, format!("skipped, {feasible} allocations")));
    }
    items.push(item(
        "dp-op-count",
        trace.op_count == dp_op_count(l, b),
        format!("{} inner maximisations, expected {}", trace.op_count, dp_op_count(l, b)),
    ));
    items.push(item(
        "dp-within-budget",
        dp.total_bits() <= b,
        format!("{} of {b} bits", dp.total_bits()),
    ));

    let g = greedy_solve(p);
    if g.guaranteed {
        items.push(item(
            "greedy-guarantee",
            g.allocation.objective >= GREEDY_FACTOR * dp.objective - 1e-12,
            format!("greedy/dp = {:.6}", g.allocation.objective / dp.objective),
        ));
    } else {
        items.push(item("greedy-guarantee", true, "skipped, table not submodular".into()));
    }
    items.push(item(
        "greedy-extractions",
        g.extractions <= b,
        format!("{} extractions for {b} bits", g.extractions),
    ));

    let scaled = p.scaled(2.0)?;
    let (s, _) = dp_solve(&scaled);
    let rescored = weighted_sum_rate(p, &s.bits)?;
    items.push(item(
        "weight-scaling-invariance",
        close(rescored, dp.objective, 1e-12) && close(s.objective, 2.0 * dp.objective, 1e-12),
        format!("rescored {rescored} vs {}", dp.objective),
    ));

    match miso_shape(p) {
        Some(betas) if b > 0 => {
            let coeffs: Vec<f64> = betas.iter().map(|(b1, b2)| b2 - b1).collect();
            let out = relaxation_solve(&coeffs, p.weights(), p.budget())?;
            let frac: f64 = betas
                .iter()
                .zip(p.weights())
                .zip(&out.fractional.bits)
                .map(|(((b1, b2), w), &x)| w * (b2 - (b2 - b1) * (-x).exp2()))
                .sum();
            let rounded = weighted_sum_rate(p, &round_allocation(&out.fractional))?;
            items.push(item(
                "relaxation-upper-bound",
                frac >= dp.objective * (1.0 - 1e-12),
                format!("fractional {frac} vs dp {}", dp.objective),
            ));
            items.push(item(
                "relaxation-half-guarantee",
                rounded >= 0.5 * dp.objective - 1e-12,
                format!("rounded/dp = {:.6}", rounded / dp.objective),
            ));
            let kkt = kkt_residuals(&out, p.budget());
            items.push(item("relaxation-kkt", kkt.max() <= 1e-9, format!("{kkt:?}")));
        }
        _ => items.push(item("relaxation", true, "skipped, table is not of MISO form".into())),
    }
    Ok(items)
}

/// Model and simulator invariants that do not depend on the input problem.
pub fn model_checks() -> fbq_core::Result<Vec<CheckItem>> {
    let mut items = Vec::new();

    let curve = beta_ratio_curve(-15.0, 15.0, 0.5)?;
    let worst = curve.iter().map(|(_, m)| m.ratio()).fold(0.0, f64::max);
    items.push(item(
        "beta-ratio-at-most-two",
        worst <= 2.0 && curve.len() == 61,
        format!("max ratio {worst:.6} over {} points", curve.len()),
    ));
    let m = MisoModel::from_db(0.0)?;
    let table = fbq_core::rates::miso_table(&[m], 16)?;
    items.push(item(
        "miso-table-submodular",
        table.is_monotone() && table.is_submodular(),
        "monotone and submodular at 0 dB".into(),
    ));

    let a = Assignment::new(vec![vec![0, 2], vec![1]], vec![5.0, 7.0])?;
    let sys = virtualize(&a, &[1.0, 2.0, 3.0])?;
    let phys = sys.to_physical(&[1.0, 10.0, 100.0]);
    items.push(item(
        "virtual-user-back-map",
        phys == vec![11.0, 100.0] && sys.weights == vec![5.0, 5.0, 7.0],
        format!("{phys:?}"),
    ));

    let mut config = SimConfig::reference([-1.0, -1.0, 1.0, 1.0], 1.0, Policy::MaxweightDp);
    config.horizon = 400;
    config.codebook = CodebookParams {
        seed: 2012,
        num_candidates: 8,
        num_channels: 200,
    };
    let cb = config.supercodebook()?;
    let runs = Policy::ALL
        .iter()
        .map(|&p| sim::run(&config.with_policy(p), &cb))
        .collect::<fbq_core::Result<Vec<_>>>()?;
    let nonneg = runs
        .iter()
        .all(|r| r.samples.iter().all(|s| s.queues.iter().all(|&q| q >= 0.0)));
    items.push(item("queues-non-negative", nonneg, format!("{} policies", runs.len())));

    let perfect = runs.iter().find(|r| r.policy == Policy::PerfectFeedback).expect("all policies ran");
    let dominated = runs.iter().all(|r| {
        r.mean_service
            .iter()
            .zip(&perfect.mean_service)
            .all(|(s, p)| *s <= p + 1e-12)
    });
    items.push(item(
        "service-below-perfect-feedback",
        dominated,
        "mean service per user under common channels".into(),
    ));

    let again = sim::run(&config, &cb)?;
    items.push(item(
        "simulation-deterministic",
        again == runs[0],
        "same seed, same trajectory".into(),
    ));

    let mut doubled = config.clone();
    doubled.initial_queues = vec![10.0, 20.0, 30.0, 40.0];
    let first = sim::run(&doubled, &cb)?.allocations[0].clone();
    doubled.initial_queues.iter_mut().for_each(|q| *q *= 2.0);
    let second = sim::run(&doubled, &cb)?.allocations[0].clone();
    items.push(item(
        "queue-scaling-keeps-allocation",
        first == second,
        format!("{first:?} vs {second:?}"),
    ));
    Ok(items)
}

pub fn run(spec: &ExperimentSpec) -> CliResult<()> {
    let problem = load_problem(spec)?;
    let mut items = problem_checks(&problem)?;
    items.extend(model_checks()?);
    for it in &items {
        spec.say(format!(
            "{} {:<32} {}",
            if it.passed { "PASS" } else { "FAIL" },
            it.name,
            it.detail
        ));
    }
    if let Some(dir) = &spec.out {
        OutDir::create(dir.clone())?.write_json("check.json", &items)?;
    }
    let failed: Vec<&str> = items.iter().filter(|i| !i.passed).map(|i| i.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::solve::{ProblemInput, TOY_PROBLEM};

    #[test]
    fn toy_problem_passes_every_check() {
        let p = crate::io::parse_json::<ProblemInput>(TOY_PROBLEM)
            .unwrap()
            .into_problem()
            .unwrap();
        let items = problem_checks(&p).unwrap();
        assert!(items.iter().any(|i| i.name == "relaxation-kkt"));
        for i in items.iter().chain(&model_checks().unwrap()) {
            assert!(i.passed, "{i:?}");
        }
    }
}
