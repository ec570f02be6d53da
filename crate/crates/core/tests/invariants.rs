use fbq_core::problem::{virtualize, AllocationProblem, Assignment, RateTable};
use fbq_core::rates::{generate_supercodebook, miso_rvq_rate, miso_table, MisoModel};
use fbq_core::solvers::{
    brute_force_solve, dp_solve, greedy_solve, relaxation_solve_miso, round_allocation,
    GREEDY_FACTOR,
};
use proptest::prelude::*;

fn rows_from_increments(incs: Vec<Vec<f64>>, sorted: bool) -> Vec<Vec<f64>> {
    incs.into_iter()
        .map(|mut inc| {
            if sorted {
                inc.sort_by(|a, b| b.total_cmp(a));
            }
            let mut row = vec![0.0];
            let mut acc = 0.0;
            for d in inc {
                acc += d;
                row.push(acc);
            }
            row
        })
        .collect()
}

fn instance(submodular: bool) -> impl Strategy<Value = AllocationProblem> {
    (1usize..=5, 0u32..=8).prop_flat_map(move |(l, b)| {
        (
            prop::collection::vec(prop::collection::vec(0.0f64..1.0, b as usize), l),
            prop::collection::vec(0.0f64..10.0, l),
        )
            .prop_map(move |(incs, w)| {
                let table = RateTable::new(rows_from_increments(incs, submodular)).unwrap();
                AllocationProblem::new(b, w, table).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dp_matches_brute_force(p in instance(false)) {
        let (dp, _) = dp_solve(&p);
        let bf = brute_force_solve(&p).unwrap();
        prop_assert!((dp.objective - bf.objective).abs() <= 1e-12 * (1.0 + bf.objective));
        prop_assert!(dp.total_bits() <= p.budget() as u64);
    }

    #[test]
    fn scaling_weights_keeps_dp_allocation(p in instance(false), s in 0.1f64..100.0) {
        let (a, _) = dp_solve(&p);
        let (b, _) = dp_solve(&p.scaled(s).unwrap());
        let rescored = fbq_core::weighted_sum_rate(&p, &b.bits).unwrap();
        prop_assert!((rescored - a.objective).abs() <= 1e-9 * (1.0 + a.objective));
    }

    #[test]
    fn weighted_submodular_rows_stay_submodular(p in instance(true)) {
        prop_assert!(p.is_monotone_submodular());
        prop_assert!(p.scaled(3.5).unwrap().is_monotone_submodular());
    }

    #[test]
    fn greedy_meets_its_guarantee(p in instance(true)) {
        let g = greedy_solve(&p);
        let (dp, _) = dp_solve(&p);
        prop_assert!(g.guaranteed);
        prop_assert!(g.extractions <= p.budget() as u64);
        prop_assert!(g.allocation.objective >= GREEDY_FACTOR * dp.objective - 1e-12);
        prop_assert!(g.allocation.objective <= dp.objective + 1e-12);
    }

    #[test]
    fn miso_rate_is_bracketed_and_increasing(db in -15.0f64..15.0, b in 0u32..30) {
        let m = MisoModel::from_db(db).unwrap();
        let r = miso_rvq_rate(&m, b);
        prop_assert!(r >= m.beta1 - 1e-15 && r <= m.beta2 + 1e-15);
        prop_assert!(miso_rvq_rate(&m, b + 1) >= r);
    }

    #[test]
    fn relaxation_brackets_the_optimum(
        dbs in prop::collection::vec(-15.0f64..15.0, 1..=5),
        seed_w in prop::collection::vec(0.1f64..10.0, 5),
        b in 0u32..=10,
    ) {
        let models: Vec<MisoModel> = dbs.iter().map(|&d| MisoModel::from_db(d).unwrap()).collect();
        let w = seed_w[..models.len()].to_vec();
        let p = AllocationProblem::new(b, w.clone(), miso_table(&models, b).unwrap()).unwrap();
        let (dp, _) = dp_solve(&p);
        let out = relaxation_solve_miso(&models, &w, b).unwrap();
        let frac = fbq_core::solvers::relax::miso_objective(&models, &w, &out.fractional.bits);
        prop_assert!(frac >= dp.objective - 1e-9 * (1.0 + dp.objective));
        let rounded = fbq_core::weighted_sum_rate(&p, &round_allocation(&out.fractional)).unwrap();
        prop_assert!(rounded >= 0.5 * dp.objective - 1e-12);
    }

    #[test]
    fn back_map_preserves_totals(
        sizes in prop::collection::vec(0usize..4, 1..5),
        vals in prop::collection::vec(0.0f64..5.0, 16),
    ) {
        let mut next = 0;
        let bands: Vec<Vec<usize>> = sizes
            .iter()
            .map(|&n| {
                let v: Vec<usize> = (next..next + n).collect();
                next += n;
                v
            })
            .collect();
        let queues: Vec<f64> = (0..sizes.len()).map(|k| k as f64 + 1.0).collect();
        let a = Assignment::new(bands, queues.clone()).unwrap();
        let snr = vec![1.0; next];
        let sys = virtualize(&a, &snr).unwrap();
        prop_assert_eq!(sys.num_virtual(), next);
        let per_virtual = &vals[..next];
        let phys = sys.to_physical(per_virtual);
        let total: f64 = per_virtual.iter().sum();
        prop_assert!((phys.iter().sum::<f64>() - total).abs() < 1e-12);
        for (v, &k) in sys.owner.iter().enumerate() {
            prop_assert_eq!(sys.weights[v], queues[k]);
        }
    }
}

#[test]
fn supercodebook_is_reproducible() {
    let a = generate_supercodebook(4, 8, 64, 7).unwrap();
    let b = generate_supercodebook(4, 8, 64, 7).unwrap();
    let c = generate_supercodebook(4, 8, 64, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}
