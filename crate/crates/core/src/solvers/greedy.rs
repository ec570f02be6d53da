//! Greedy marginal-utility allocation.
//!
//! Each step grants one bit to the user whose next bit adds the most
//! weighted rate. On monotone tables with diminishing returns this is
//! within `1 - 1/e` of the optimum.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::problem::{Allocation, AllocationProblem};

#[derive(Debug, Clone, Copy)]
struct Candidate {
    utility: f64,
    user: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Larger utility first, then lower user index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.utility
            .total_cmp(&other.utility)
            .then_with(|| other.user.cmp(&self.user))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub allocation: Allocation,
    /// Heap pops that granted a bit.
    pub extractions: u64,
    /// The table was monotone and submodular, so the `1 - 1/e` bound holds.
    pub guaranteed: bool,
    /// Stopped before spending the budget because no marginal utility was positive.
    pub early_stopped: bool,
}

fn utility(problem: &AllocationProblem, user: usize, bits: u32) -> Option<Candidate> {
    let b = bits as usize;
    (b < problem.budget() as usize).then(|| Candidate {
        utility: problem.weighted_rate(user, b + 1) - problem.weighted_rate(user, b),
        user,
    })
}

pub fn greedy_solve(problem: &AllocationProblem) -> GreedyOutcome {
    let mut bits = vec![0u32; problem.num_users()];
    let mut heap: BinaryHeap<Candidate> = (0..problem.num_users())
        .filter_map(|k| utility(problem, k, 0))
        .collect();
    let mut granted = 0u32;
    let mut extractions = 0u64;
    while granted < problem.budget() {
        match heap.peek() {
            Some(top) if top.utility > 0.0 => {}
            _ => break,
        }
        let Candidate { user, .. } = heap.pop().expect("peeked");
        extractions += 1;
        bits[user] += 1;
        granted += 1;
        if let Some(next) = utility(problem, user, bits[user]) {
            heap.push(next);
        }
    }
    let early_stopped = granted < problem.budget();
    GreedyOutcome {
        allocation: Allocation::evaluate(problem, bits).expect("greedy never exceeds the budget"),
        extractions,
        guaranteed: problem.is_monotone_submodular(),
        early_stopped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::RateTable;

    #[test]
    fn toy_picks_one_bit_each() {
        let t = RateTable::new(vec![vec![0.0, 1.0, 1.5], vec![0.0, 0.9, 1.35]]).unwrap();
        let p = AllocationProblem::new(2, vec![1.0, 1.0], t).unwrap();
        let out = greedy_solve(&p);
        assert_eq!(out.allocation.bits, vec![1, 1]);
        assert!((out.allocation.objective - 1.9).abs() < 1e-12);
        assert_eq!(out.extractions, 2);
        assert!(out.guaranteed && !out.early_stopped);
    }

    #[test]
    fn identical_rows_split_evenly() {
        let row: Vec<f64> = (0..=9).map(|b| 1.0 - 0.5f64.powi(b)).collect();
        let t = RateTable::new(vec![row; 3]).unwrap();
        let p = AllocationProblem::new(9, vec![1.0; 3], t).unwrap();
        assert_eq!(greedy_solve(&p).allocation.bits, vec![3, 3, 3]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let t = RateTable::new(vec![vec![0.0, 1.0]; 3]).unwrap();
        let p = AllocationProblem::new(1, vec![1.0; 3], t).unwrap();
        assert_eq!(greedy_solve(&p).allocation.bits, vec![1, 0, 0]);
    }

    #[test]
    fn stops_when_utilities_vanish() {
        let t = RateTable::new(vec![vec![0.0, 1.0, 1.0, 1.0], vec![0.5, 0.5, 0.5, 0.2]]).unwrap();
        let p = AllocationProblem::new(3, vec![1.0, 1.0], t).unwrap();
        let out = greedy_solve(&p);
        assert_eq!(out.allocation.bits, vec![1, 0]);
        assert_eq!(out.extractions, 1);
        assert!(out.early_stopped);
        assert!(!out.guaranteed);

        let zero_weights = AllocationProblem::new(3, vec![0.0, 0.0], p.rate_table().clone()).unwrap();
        assert_eq!(greedy_solve(&zero_weights).allocation.bits, vec![0, 0]);
    }

    #[test]
    fn zero_budget() {
        let t = RateTable::new(vec![vec![0.2], vec![0.1]]).unwrap();
        let p = AllocationProblem::new(0, vec![1.0, 3.0], t).unwrap();
        let out = greedy_solve(&p);
        assert_eq!(out.allocation.bits, vec![0, 0]);
        assert_eq!(out.extractions, 0);
        assert!(!out.early_stopped);
    }
}
