//! Seeded instances shared by the benchmarks.

use fbq_core::rates::{miso_table, MisoModel};
use fbq_core::{rng, AllocationProblem};
use rand::Rng;

/// `l` MISO users with SNRs uniform in [-15, 15] dB and weights in [0.1, 10).
pub fn miso_instance(l: usize, budget: u32, seed: u64) -> (Vec<MisoModel>, AllocationProblem) {
    let mut r = rng::stream(seed, l as u64);
    let models: Vec<MisoModel> = (0..l)
        .map(|_| MisoModel::from_db(r.random_range(-15.0..=15.0)).expect("finite SNR"))
        .collect();
    let weights: Vec<f64> = (0..l).map(|_| r.random_range(0.1..10.0)).collect();
    let table = miso_table(&models, budget).expect("valid models");
    let problem = AllocationProblem::new(budget, weights, table).expect("consistent sizes");
    (models, problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_seeded() {
        let (_, a) = miso_instance(5, 8, 1);
        let (_, b) = miso_instance(5, 8, 1);
        assert_eq!(a, b);
        assert!(a.is_monotone_submodular());
    }
}
