//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::SQRT_2;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use drfcheck::{run, Command, RunConfig};
use drfcheck_core::behavior::{NUM_CELLS, NUM_SETTINGS};
use drfcheck_core::causal::{enumerate_strategies, membership, strategy_behavior, StrategySpace};
use drfcheck_core::inequality::{check_no_signaling, evaluate_vbc};
use drfcheck_core::linalg::validate_kraus;
use drfcheck_core::spacetime::{
    fiber_delay, interval_type, Event, IntervalType, DEFAULT_GROUP_INDEX, SPEED_OF_LIGHT,
};
use drfcheck_core::stats::{
    estimate, nosignal_stat_check, nosignal_stat_check_with, sample_counts, significance,
};
use drfcheck_core::stats::{Correction, NoSignalStatOptions};
use drfcheck_core::switch::{measure_reprepare, switch_kraus};
use drfcheck_core::{compute_behavior, NoiseModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IDEAL_TERM3: f64 = 0.5 + SQRT_2 / 4.0;
const IDEAL_TOTAL: f64 = 1.5 + SQRT_2 / 4.0;
const EXACT_TOL: f64 = 1e-9;

/// Combinatorial count: two orders, 4 first-Alice, 16 second-Alice, 256
/// Charlie and 4 Bob response functions.
const STRATEGY_COUNT: usize = 2 * 4 * 16 * 256 * 4;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn experiment_noise() -> NoiseModel {
    NoiseModel::new(0.98, 0.92, 1.0).unwrap()
}

fn criterion_1() -> Outcome {
    let (report, elapsed) = timed(|| run(Command::Exact, RunConfig::default(), &[]).unwrap());
    let v = report.results.vbc.unwrap();
    let pass = (v.term1 - 0.5).abs() < EXACT_TOL
        && (v.term2 - 0.5).abs() < EXACT_TOL
        && (v.term3 - IDEAL_TERM3).abs() < EXACT_TOL
        && (v.total - IDEAL_TOTAL).abs() < EXACT_TOL
        && elapsed < Duration::from_secs(1);
    Outcome {
        pass,
        detail: format!(
            "terms ({:.10}, {:.10}, {:.10}) total {:.10} in {:.3}s",
            v.term1,
            v.term2,
            v.term3,
            v.total,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Outcome {
    let (report, elapsed) = timed(|| run(Command::Bound, RunConfig::default(), &[]).unwrap());
    let b = report.results.bound.unwrap();
    let pass = b.result.max_value == 1.75
        && b.result.strategies_checked == STRATEGY_COUNT
        && elapsed < Duration::from_secs(5);
    Outcome {
        pass,
        detail: format!(
            "max {} over {} strategies (expected {}) in {:.3}s",
            b.result.max_value,
            b.result.strategies_checked,
            STRATEGY_COUNT,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_3() -> Outcome {
    let ((ideal_infeasible, vertices_ok, worst), elapsed) = timed(|| {
        let ideal = compute_behavior(&NoiseModel::IDEAL).unwrap();
        let ideal_infeasible = membership(&ideal).map(|r| !r.feasible).unwrap_or(false);
        let space = StrategySpace::default();
        let mut ok = 0usize;
        let mut worst: f64 = 0.0;
        for index in 0..space.len() {
            let b = strategy_behavior(&space.strategy(index));
            let Ok(r) = membership(&b) else { continue };
            let sum: f64 = r.certificate.iter().map(|w| w.weight).sum();
            let mixture = r.mixture(&space);
            let err = mixture
                .iter()
                .zip(b.cells())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst = worst.max(err);
            if r.feasible
                && err <= EXACT_TOL
                && (sum - 1.0).abs() <= EXACT_TOL
                && r.certificate.iter().all(|w| w.weight >= 0.0)
            {
                ok += 1;
            }
        }
        (ideal_infeasible, ok, worst)
    });
    let pass =
        ideal_infeasible && vertices_ok == STRATEGY_COUNT && elapsed < Duration::from_secs(60);
    Outcome {
        pass,
        detail: format!(
            "ideal infeasible: {ideal_infeasible}; {vertices_ok}/{STRATEGY_COUNT} vertex behaviors certified (worst residual {worst:.1e}) in {:.2}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_4() -> Outcome {
    let v = evaluate_vbc(&compute_behavior(&experiment_noise()).unwrap());
    let pass = (v.term1 - 0.490).abs() <= 0.001
        && (v.term2 - 0.490).abs() <= 0.001
        && (v.total - 1.807).abs() <= 0.02;
    Outcome {
        pass,
        detail: format!(
            "term1 {:.4} term2 {:.4} term3 {:.4} total {:.4}",
            v.term1, v.term2, v.term3, v.total
        ),
    }
}

fn criterion_5() -> Outcome {
    let sigmas = significance(1.807, 0.010);
    Outcome {
        pass: (sigmas - 5.7).abs() <= 0.05,
        detail: format!("(1.807 - 1.75)/0.010 = {sigmas:.4} sigma"),
    }
}

fn criterion_6() -> Outcome {
    let behavior = compute_behavior(&experiment_noise()).unwrap();
    let exact = evaluate_vbc(&behavior).total;
    let seed = 2024;
    let est = |rounds| estimate(&sample_counts(&behavior, rounds, 1.0, seed).unwrap()).unwrap();
    let big = est(1_000_000);
    let within = (big.total.value - exact).abs() <= 3.0 * big.total.std;
    let stds = [est(10_000).total.std, est(100_000).total.std, big.total.std];
    let ratios = [
        stds[0] / stds[1] / 10f64.sqrt(),
        stds[1] / stds[2] / 10f64.sqrt(),
        stds[0] / stds[2] / 10.0,
    ];
    let scaling = ratios.iter().all(|r| (r - 1.0).abs() <= 0.2);
    Outcome {
        pass: within && scaling,
        detail: format!(
            "total {:.5} +- {:.5} vs exact {:.5} ({:.2} sigma); scaling ratios {:.3} {:.3} {:.3}",
            big.total.value,
            big.total.std,
            exact,
            (big.total.value - exact).abs() / big.total.std,
            ratios[0],
            ratios[1],
            ratios[2]
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut exact_ok = true;
    for i in 0..5 {
        for j in 0..5 {
            let noise = NoiseModel::new(i as f64 / 4.0, j as f64 / 4.0, 1.0).unwrap();
            let r = check_no_signaling(&compute_behavior(&noise).unwrap(), 1e-12);
            exact_ok &= r.satisfied;
            worst = r
                .constraints
                .iter()
                .fold(worst, |m, c| m.max(c.max_deviation));
        }
    }
    let behavior = compute_behavior(&experiment_noise()).unwrap();
    let per_comparison = NoSignalStatOptions {
        correction: Correction::PerComparison,
        ..Default::default()
    };
    let mut clean = 0;
    let mut clean_uncorrected = 0;
    for seed in 0..100 {
        let table = sample_counts(&behavior, 1_000_000, 1.0, seed).unwrap();
        clean += usize::from(!nosignal_stat_check(&table).flagged);
        clean_uncorrected += usize::from(!nosignal_stat_check_with(&table, per_comparison).flagged);
    }
    Outcome {
        pass: exact_ok && clean >= 95,
        detail: format!(
            "exact 5x5 grid max deviation {worst:.1e}; {clean}/100 seeds unflagged (family-wise 3 sigma), {clean_uncorrected}/100 without correction"
        ),
    }
}

fn criterion_8() -> Outcome {
    let (report, elapsed) = timed(|| run(Command::Optimize, RunConfig::default(), &[]).unwrap());
    let o = report.results.optimize.unwrap();
    let pass = o.result.best_total >= 1.853_552_3
        && o.equivalent_to_canonical
        && elapsed < Duration::from_secs(30);
    Outcome {
        pass,
        detail: format!(
            "best {:.10} at bob {:?} charlie {:?}, symmetric to canonical: {} in {:.3}s",
            o.result.best_total,
            o.result.angles.bob,
            o.result.angles.charlie,
            o.equivalent_to_canonical,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_9() -> Outcome {
    let mut kraus_ok = true;
    for x1 in 0..2 {
        for x2 in 0..2 {
            let branches = switch_kraus(
                &measure_reprepare(x1).unwrap(),
                &measure_reprepare(x2).unwrap(),
            )
            .unwrap();
            let all: Vec<_> = branches.into_iter().flat_map(|b| b.kraus).collect();
            kraus_ok &= validate_kraus(&all).complete;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut normalized = true;
    let mut linear_err: f64 = 0.0;
    for _ in 0..50 {
        let a =
            compute_behavior(&NoiseModel::new(rng.random(), rng.random(), 1.0).unwrap()).unwrap();
        let b =
            compute_behavior(&NoiseModel::new(rng.random(), rng.random(), 1.0).unwrap()).unwrap();
        for s in 0..NUM_SETTINGS {
            let d = a.distribution(drfcheck_core::Settings::from_index(s));
            normalized &=
                (d.iter().sum::<f64>() - 1.0).abs() < 1e-12 && d.iter().all(|&p| p >= -1e-12);
        }
        let w: f64 = rng.random();
        let mixed = evaluate_vbc(&a.mix(&b, w).unwrap()).total;
        let expected = w * evaluate_vbc(&a).total + (1.0 - w) * evaluate_vbc(&b).total;
        linear_err = linear_err.max((mixed - expected).abs());
    }

    let count = enumerate_strategies().count();

    let exe = env!("CARGO_BIN_EXE_drfcheck");
    let rerun = || {
        Process::new(exe)
            .args(["sample", "--seed", "31337"])
            .env_remove("DRFCHECK_CONFIG_DIR")
            .output()
            .unwrap()
            .stdout
    };
    let first = rerun();
    let identical = !first.is_empty() && first == rerun();

    let pass = kraus_ok && normalized && linear_err < 1e-12 && count == STRATEGY_COUNT && identical;
    Outcome {
        pass,
        detail: format!(
            "kraus complete {kraus_ok}; normalized {normalized}; linearity error {linear_err:.1e}; \
             enumeration {count} (2 orders x 4 x 16 x 256 x 4 = {STRATEGY_COUNT}); byte-identical rerun {identical}"
        ),
    }
}

fn criterion_10() -> Outcome {
    let delay = fiber_delay(200.0, DEFAULT_GROUP_INDEX).unwrap();
    let rel = (delay - 1e-6).abs() / 1e-6;
    let o = Event::new("o", 0.0, [0.0; 3]).unwrap();
    let at = |t: f64, x: f64| Event::new("e", t, [x, 0.0, 0.0]).unwrap();
    let t = 3000.0 / SPEED_OF_LIGHT;
    let boundary = interval_type(&o, &at(0.0, 3000.0)) == IntervalType::Spacelike
        && interval_type(&o, &at(1.0, 0.0)) == IntervalType::Timelike
        && interval_type(&o, &at(t, 3000.0)) == IntervalType::Lightlike
        && interval_type(&o, &at(t * (1.0 + 1e-6), 3000.0)) == IntervalType::Timelike
        && interval_type(&o, &at(t * (1.0 - 1e-6), 3000.0)) == IntervalType::Spacelike;
    Outcome {
        pass: rel <= 0.03 && boundary,
        detail: format!(
            "200 m at n={DEFAULT_GROUP_INDEX} -> {:.4} us ({:.2}% from 1 us); boundary tests {}",
            delay * 1e6,
            rel * 100.0,
            if boundary { "pass" } else { "fail" }
        ),
    }
}

fn main() {
    assert_eq!(NUM_CELLS, 256);
    let criteria: [Criterion; 10] = [
        ("ideal quantum value", criterion_1),
        ("classical bound", criterion_2),
        ("violation certificate", criterion_3),
        ("noise reproduction", criterion_4),
        ("significance arithmetic", criterion_5),
        ("finite statistics", criterion_6),
        ("no-signaling", criterion_7),
        ("optimizer", criterion_8),
        ("property suites", criterion_9),
        ("spacetime", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2} {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
