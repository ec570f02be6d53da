//! Exhaustive enumeration, used as a test oracle.

use crate::error::{Error, Result};
use crate::problem::{Allocation, AllocationProblem};

/// Largest `C(B+L-1, L-1)` accepted by [`brute_force_solve`].
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of allocations spending exactly `B` bits over `L` users.
pub fn allocation_count(num_users: u64, budget: u64) -> u128 {
    if num_users == 0 {
        return u128::from(budget == 0);
    }
    binomial(budget + num_users - 1, num_users - 1)
}

/// Maximises over every `b` with `sum b_k <= B`; first maximiser in
/// lexicographic order wins ties.
pub fn brute_force_solve(problem: &AllocationProblem) -> Result<Allocation> {
    let count = allocation_count(problem.num_users() as u64, problem.budget() as u64);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::InstanceTooLarge {
            count,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut current = vec![0u32; problem.num_users()];
    let mut best = (f64::NEG_INFINITY, current.clone());
    search(problem, 0, problem.budget(), 0.0, &mut current, &mut best);
    Allocation::evaluate(problem, best.1)
}

fn search(
    problem: &AllocationProblem,
    user: usize,
    left: u32,
    partial: f64,
    current: &mut Vec<u32>,
    best: &mut (f64, Vec<u32>),
) {
    if user == current.len() {
        if partial > best.0 {
            best.0 = partial;
            best.1.clone_from(current);
        }
        return;
    }
    for j in 0..=left {
        current[user] = j;
        let v = partial + problem.weighted_rate(user, j as usize);
        search(problem, user + 1, left - j, v, current, best);
    }
    current[user] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::RateTable;

    #[test]
    fn toy_enumeration() {
        let t = RateTable::new(vec![vec![0.0, 1.0, 1.5], vec![0.0, 0.9, 1.35]]).unwrap();
        let p = AllocationProblem::new(2, vec![1.0, 1.0], t).unwrap();
        let a = brute_force_solve(&p).unwrap();
        assert_eq!(a.bits, vec![1, 1]);
        assert!((a.objective - 1.9).abs() < 1e-12);
    }

    #[test]
    fn zero_budget_is_zeros() {
        let t = RateTable::new(vec![vec![0.4], vec![0.1]]).unwrap();
        let p = AllocationProblem::new(0, vec![1.0, 1.0], t).unwrap();
        assert_eq!(brute_force_solve(&p).unwrap().bits, vec![0, 0]);
    }

    #[test]
    fn guard_rejects_large_instances() {
        let t = RateTable::new(vec![vec![0.0; 41]; 12]).unwrap();
        let p = AllocationProblem::new(40, vec![1.0; 12], t).unwrap();
        assert!(matches!(brute_force_solve(&p), Err(Error::InstanceTooLarge { .. })));
    }

    #[test]
    fn counts() {
        assert_eq!(allocation_count(2, 2), 3);
        assert_eq!(allocation_count(8, 12), 50_388);
        assert_eq!(binomial(19, 7), 50_388);
        assert_eq!(allocation_count(0, 0), 1);
    }
}
