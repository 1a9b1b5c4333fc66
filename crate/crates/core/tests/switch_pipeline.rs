use std::f64::consts::SQRT_2;

use approx::assert_abs_diff_eq;
use drfcheck_core::inequality::{check_no_signaling, evaluate_vbc, QUANTUM_MAX};
use drfcheck_core::linalg::validate_kraus;
use drfcheck_core::switch::{measure_reprepare, switch_kraus};
use drfcheck_core::{compute_behavior, NoiseModel};

fn closed_form(v: f64, p: f64) -> (f64, f64) {
    ((3.0 + p) / 8.0, 0.5 + p * (1.0 + v) * SQRT_2 / 8.0)
}

#[test]
fn ideal_terms() {
    let r = evaluate_vbc(&compute_behavior(&NoiseModel::IDEAL).unwrap());
    assert_abs_diff_eq!(r.term1, 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(r.term2, 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(r.term3, 0.5 + SQRT_2 / 4.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.total, QUANTUM_MAX, epsilon = 1e-12);
}

#[test]
fn closed_form_regression_on_grid() {
    for i in 0..=4 {
        for j in 0..=4 {
            let (v, p) = (i as f64 / 4.0, j as f64 / 4.0);
            let r = evaluate_vbc(&compute_behavior(&NoiseModel::new(v, p, 1.0).unwrap()).unwrap());
            let (t12, t3) = closed_form(v, p);
            assert_abs_diff_eq!(r.term1, t12, epsilon = 1e-12);
            assert_abs_diff_eq!(r.term2, t12, epsilon = 1e-12);
            assert_abs_diff_eq!(r.term3, t3, epsilon = 1e-12);
        }
    }
}

#[test]
fn experimental_noise_point() {
    let r = evaluate_vbc(&compute_behavior(&NoiseModel::new(0.98, 0.92, 1.0).unwrap()).unwrap());
    assert_abs_diff_eq!(r.term1, 0.49, epsilon = 1e-12);
    assert_abs_diff_eq!(r.term3, 0.5 + 0.92 * 1.98 * SQRT_2 / 8.0, epsilon = 1e-12);
    assert!((r.total - 1.807).abs() < 0.02);
}

#[test]
fn exact_behaviors_never_signal() {
    for i in 0..5 {
        for j in 0..5 {
            let noise = NoiseModel::new(0.6 + 0.1 * i as f64, 0.2 * j as f64, 1.0).unwrap();
            let r = check_no_signaling(&compute_behavior(&noise).unwrap(), 1e-12);
            assert!(r.satisfied, "{noise:?}: {r:?}");
        }
    }
}

#[test]
fn switch_kraus_complete_for_all_inputs() {
    for x1 in 0..2 {
        for x2 in 0..2 {
            let branches = switch_kraus(
                &measure_reprepare(x1).unwrap(),
                &measure_reprepare(x2).unwrap(),
            )
            .unwrap();
            assert_eq!(branches.len(), 4);
            let all: Vec<_> = branches.into_iter().flat_map(|b| b.kraus).collect();
            let check = validate_kraus(&all);
            assert!(check.complete, "x1={x1} x2={x2}: {}", check.max_deviation);
        }
    }
}

#[test]
fn efficiency_does_not_change_exact_behavior() {
    let a = compute_behavior(&NoiseModel::new(0.9, 0.8, 1.0).unwrap()).unwrap();
    let b = compute_behavior(&NoiseModel::new(0.9, 0.8, 0.1).unwrap()).unwrap();
    assert_eq!(a, b);
}
