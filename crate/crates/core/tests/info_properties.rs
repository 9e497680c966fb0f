use ffrx::info::{
    bhattacharyya_matrix, capacity_gap, cutoff_kkt_residual, cutoff_rate_at, maximize_mutual_information,
    minimize_cutoff_objective, mutual_information, PriorDistribution,
};
use ffrx::receiver::{build_decision_tree, exact_channel_matrix, ReceiverConfig};
use ffrx::ChannelMatrix;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn channel_strategy() -> impl Strategy<Value = ChannelMatrix> {
    (2usize..=4).prop_flat_map(|m| {
        prop::collection::vec(prop::collection::vec(0.001..1.0f64, m), m)
            .prop_map(|rows| ChannelMatrix::from_rows(rows.into_iter().map(normalize).collect(), 1e-12).unwrap())
    })
}

fn simplex_point(m: usize) -> impl Strategy<Value = PriorDistribution> {
    prop::collection::vec(0.0..1.0f64, m).prop_map(|v| {
        let v = if v.iter().sum::<f64>() == 0.0 { vec![1.0; v.len()] } else { v };
        PriorDistribution::new(normalize(v)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mi_within_bounds((ch, prior) in channel_strategy().prop_flat_map(|c| { let m = c.symbols(); (Just(c), simplex_point(m)) })) {
        let i = mutual_information(&ch, &prior).unwrap();
        prop_assert!(i >= 0.0);
        prop_assert!(i <= (ch.symbols() as f64).log2() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn capacity_dominates_uniform(ch in channel_strategy()) {
        let r = maximize_mutual_information(&ch, 1e-10).unwrap();
        let uniform = mutual_information(&ch, &PriorDistribution::uniform(ch.symbols())).unwrap();
        prop_assert!(r.value >= uniform - 1e-12);
        prop_assert!(capacity_gap(&ch, &r.optimal_prior).unwrap() <= 1e-10);
    }

    #[test]
    fn cutoff_minimum_is_global(ch in channel_strategy(), seeds in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 4), 100)) {
        let b = bhattacharyya_matrix(&ch);
        let r = minimize_cutoff_objective(&b).unwrap();
        prop_assert!(cutoff_kkt_residual(&b, &r.optimal_prior) <= 1e-10);
        let q_min = b.quadratic_form(r.optimal_prior.as_slice());
        for s in seeds {
            let p = PriorDistribution::new(normalize(s[..ch.symbols()].iter().map(|x| x + 1e-9).collect())).unwrap();
            prop_assert!(q_min <= b.quadratic_form(p.as_slice()) + 1e-12);
            prop_assert!(r.value >= cutoff_rate_at(&p, &b).unwrap() - 1e-12);
        }
        let cap = maximize_mutual_information(&ch, 1e-10).unwrap();
        prop_assert!(r.value <= cap.value * std::f64::consts::LN_2 + 1e-9);
    }

    #[test]
    fn bhattacharyya_is_psd_gram(ch in channel_strategy()) {
        let b = bhattacharyya_matrix(&ch);
        let m = b.symbols();
        for i in 0..m {
            prop_assert!((b.get(i, i) - 1.0).abs() <= 1e-12);
            for k in 0..m {
                prop_assert_eq!(b.get(i, k), b.get(k, i));
            }
        }
        let mat = DMatrix::from_fn(m, m, |i, k| b.get(i, k));
        let min = mat.symmetric_eigenvalues().min();
        prop_assert!(min >= -1e-12);
    }
}

#[test]
fn receiver_grid_certificates() {
    for m in [3, 4] {
        let tree = build_decision_tree(m).unwrap();
        for k in 0..=20 {
            let a = k as f64 * 0.25;
            let ch = exact_channel_matrix(&ReceiverConfig::new(m, a), &tree).unwrap();
            let b = bhattacharyya_matrix(&ch);
            let mat = DMatrix::from_fn(m, m, |i, j| b.get(i, j));
            assert!(mat.symmetric_eigenvalues().min() >= -1e-12);
            let rc = minimize_cutoff_objective(&b).unwrap();
            let cap = maximize_mutual_information(&ch, 1e-10).unwrap();
            assert!(rc.value <= cap.value * std::f64::consts::LN_2 + 1e-9, "M={m} a={a}");
            assert!(cutoff_kkt_residual(&b, &rc.optimal_prior) <= 1e-10);
        }
    }
}
