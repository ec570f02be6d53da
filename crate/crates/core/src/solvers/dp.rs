//! Exact dynamic program over users and remaining bits.
//!
//! `R(k, b)` is the best weighted rate of the first `k` users when they use
//! exactly `b` bits; `R(k, b) = max_{j <= b} R(k-1, b-j) + q_k A(k, j)`.
//! The optimum over `sum b_k <= B` is `max_b R(L, b)`.

use crate::problem::{Allocation, AllocationProblem};

/// Value and choice tables of a DP run.
#[derive(Debug, Clone, PartialEq)]
pub struct DpTrace {
    /// `values[k][b]`, users `0..=k` sharing exactly `b` bits.
    pub values: Vec<Vec<f64>>,
    /// Bits given to user `k` in the maximiser of `values[k][b]`.
    pub choices: Vec<Vec<u32>>,
    /// Inner-max evaluations performed.
    pub op_count: u64,
}

/// `L (B+1) (B+2) / 2`.
pub fn dp_op_count(num_users: u64, budget: u64) -> u64 {
    num_users * (budget + 1) * (budget + 2) / 2
}

/// Solves the allocation exactly. Ties go to the smallest `j`, i.e. the
/// fewest bits to the later user, and then to the smallest total.
pub fn dp_solve(problem: &AllocationProblem) -> (Allocation, DpTrace) {
    let users = problem.num_users();
    let budget = problem.budget() as usize;
    let mut trace = DpTrace {
        values: Vec::with_capacity(users),
        choices: Vec::with_capacity(users),
        op_count: 0,
    };
    if users == 0 {
        return (Allocation::zeros(problem), trace);
    }

    // R(0, b): only b = 0 is reachable.
    let mut prev = vec![f64::NEG_INFINITY; budget + 1];
    prev[0] = 0.0;
    for k in 0..users {
        let gains: Vec<f64> = (0..=budget).map(|j| problem.weighted_rate(k, j)).collect();
        let mut row = vec![f64::NEG_INFINITY; budget + 1];
        let mut choice = vec![0u32; budget + 1];
        for b in 0..=budget {
            let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
            for j in 0..=b {
                let v = prev[b - j] + gains[j];
                if v > best {
                    best = v;
                    arg = j;
                }
            }
            trace.op_count += b as u64 + 1;
            row[b] = best;
            choice[b] = arg as u32;
        }
        trace.values.push(row.clone());
        trace.choices.push(choice);
        prev = row;
    }

    let mut remaining = (0..=budget)
        .fold((f64::NEG_INFINITY, 0), |(bv, bb), b| {
            if prev[b] > bv {
                (prev[b], b)
            } else {
                (bv, bb)
            }
        })
        .1;
    let mut bits = vec![0u32; users];
    for k in (0..users).rev() {
        let j = trace.choices[k][remaining];
        bits[k] = j;
        remaining -= j as usize;
    }
    debug_assert_eq!(remaining, 0);
    let allocation = Allocation::evaluate(problem, bits).expect("DP traceback is feasible");
    (allocation, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::RateTable;

    fn toy() -> AllocationProblem {
        let t = RateTable::new(vec![vec![0.0, 1.0, 1.5], vec![0.0, 0.9, 1.35]]).unwrap();
        AllocationProblem::new(2, vec![1.0, 1.0], t).unwrap()
    }

    #[test]
    fn two_user_two_bit_example() {
        let (alloc, trace) = dp_solve(&toy());
        assert_eq!(alloc.bits, vec![1, 1]);
        assert!((alloc.objective - 1.9).abs() < 1e-12);
        assert!((trace.values[1][2] - 1.9).abs() < 1e-12);
        // R(2,1) = max{R(1,1), A(2,1)}
        assert_eq!(trace.values[1][1], 1.0);
        assert_eq!(trace.op_count, dp_op_count(2, 2));
    }

    #[test]
    fn base_row_and_recursion_hold_cell_by_cell() {
        let t = RateTable::new(vec![
            vec![0.2, 0.5, 0.6, 0.9],
            vec![0.0, 0.7, 0.8, 0.85],
            vec![0.1, 0.1, 0.4, 1.2],
        ])
        .unwrap();
        let p = AllocationProblem::new(3, vec![1.5, 2.0, 0.5], t).unwrap();
        let (_, trace) = dp_solve(&p);
        for b in 0..=3 {
            assert_eq!(trace.values[0][b], p.weighted_rate(0, b));
        }
        for k in 1..3 {
            for b in 0..=3 {
                let m = (0..=b)
                    .map(|j| trace.values[k - 1][b - j] + p.weighted_rate(k, j))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(trace.values[k][b], m);
            }
        }
    }

    #[test]
    fn single_user_takes_argmax() {
        let t = RateTable::new(vec![vec![0.0, 0.4, 0.7, 0.9]]).unwrap();
        let p = AllocationProblem::new(3, vec![2.0], t).unwrap();
        assert_eq!(dp_solve(&p).0.bits, vec![3]);

        let t = RateTable::new(vec![vec![0.0, 0.9, 0.4, 0.3]]).unwrap();
        let p = AllocationProblem::new(3, vec![2.0], t).unwrap();
        assert_eq!(dp_solve(&p).0.bits, vec![1]);
    }

    #[test]
    fn zero_budget() {
        let t = RateTable::new(vec![vec![0.3], vec![0.5]]).unwrap();
        let p = AllocationProblem::new(0, vec![2.0, 1.0], t).unwrap();
        let (a, trace) = dp_solve(&p);
        assert_eq!(a.bits, vec![0, 0]);
        assert!((a.objective - 1.1).abs() < 1e-12);
        assert_eq!(trace.op_count, 2);
    }

    #[test]
    fn op_count_formula() {
        assert_eq!(dp_op_count(50, 50), 66_300);
        assert_eq!(dp_op_count(8, 12), 728);
    }
}
