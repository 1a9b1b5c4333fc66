use drfcheck_core::behavior::{Settings, NUM_CELLS};
use drfcheck_core::causal::{strategy_behavior, StrategySpace};
use drfcheck_core::inequality::{check_no_signaling, evaluate_vbc};
use drfcheck_core::stats::sample_counts;
use drfcheck_core::{compute_behavior, NoiseModel};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn behaviors_are_normalized(v in 0.0..=1.0f64, p in 0.0..=1.0f64) {
        let b = compute_behavior(&NoiseModel::new(v, p, 1.0).unwrap()).unwrap();
        for s in Settings::all() {
            let d = b.distribution(s);
            prop_assert!(d.iter().all(|&x| x >= -1e-12));
            prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        prop_assert!(check_no_signaling(&b, 1e-12).satisfied);
    }

    #[test]
    fn vbc_is_linear_under_mixtures(
        v1 in 0.0..=1.0f64, p1 in 0.0..=1.0f64,
        v2 in 0.0..=1.0f64, p2 in 0.0..=1.0f64,
        w in 0.0..=1.0f64,
    ) {
        let a = compute_behavior(&NoiseModel::new(v1, p1, 1.0).unwrap()).unwrap();
        let b = compute_behavior(&NoiseModel::new(v2, p2, 1.0).unwrap()).unwrap();
        let mixed = evaluate_vbc(&a.mix(&b, w).unwrap());
        let (ra, rb) = (evaluate_vbc(&a), evaluate_vbc(&b));
        prop_assert!((mixed.total - (w * ra.total + (1.0 - w) * rb.total)).abs() < 1e-12);
        prop_assert!((mixed.term3 - (w * ra.term3 + (1.0 - w) * rb.term3)).abs() < 1e-12);
    }

    #[test]
    fn vertices_respect_bound_and_order(index in 0..131_072usize) {
        let s = StrategySpace::default().strategy(index);
        prop_assert!(s.respects_order());
        prop_assert!(evaluate_vbc(&strategy_behavior(&s)).total <= 1.75);
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), rounds in 1..50_000u64) {
        let b = compute_behavior(&NoiseModel::new(0.98, 0.92, 1.0).unwrap()).unwrap();
        let t1 = sample_counts(&b, rounds, 0.5, seed).unwrap();
        let t2 = sample_counts(&b, rounds, 0.5, seed).unwrap();
        prop_assert_eq!(t1.counts(), t2.counts());
        prop_assert!(t1.detected() <= rounds);
        prop_assert_eq!(t1.counts().len(), NUM_CELLS);
    }
}

#[test]
fn enumeration_count() {
    assert_eq!(
        drfcheck_core::causal::enumerate_strategies().count(),
        131_072
    );
}
