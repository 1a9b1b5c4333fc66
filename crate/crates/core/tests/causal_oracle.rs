use drfcheck_core::behavior::{Behavior, Outcome, Settings, NUM_CELLS, NUM_OUTCOMES};
use drfcheck_core::causal::{
    classical_bound, classical_bound_in, classical_bound_range, membership, strategy_behavior,
    FirstOutcomeDependence, StrategySpace, VertexSet,
};
use drfcheck_core::inequality::{
    evaluate_functional, evaluate_vbc, Expr, FunctionalDef, LinearFunctional, Predicate, TermDef,
    Variable,
};
use drfcheck_core::{compute_behavior, NoiseModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_cell_error(a: &[f64; NUM_CELLS], b: &[f64; NUM_CELLS]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn vbc_classical_bound_is_seven_quarters() {
    let r = classical_bound(&LinearFunctional::vbc());
    assert_eq!(r.max_value, 1.75);
    assert_eq!(r.strategies_checked, 131_072);
    let value = evaluate_vbc(&strategy_behavior(&r.argmax)).total;
    assert_eq!(value, 1.75);
}

#[test]
fn bound_unchanged_with_constant_first_outcome() {
    let space = StrategySpace::new(FirstOutcomeDependence::Constant);
    let r = classical_bound_in(&LinearFunctional::vbc(), &space);
    assert_eq!(r.max_value, 1.75);
    assert_eq!(r.strategies_checked, 65_536);
}

#[test]
fn bound_independent_of_partitioning() {
    let f = LinearFunctional::vbc();
    let space = StrategySpace::default();
    let whole = classical_bound(&f);
    let merged = [0..10_000, 10_000..70_000, 70_000..space.len()]
        .into_iter()
        .map(|r| classical_bound_range(&f, &space, r).unwrap())
        .reduce(|a, b| a.merge(b))
        .unwrap();
    assert_eq!(merged, whole);
}

#[test]
fn trivial_functionals() {
    let zero = LinearFunctional::from_coefficients("zero", [0.0; NUM_CELLS]).unwrap();
    assert_eq!(classical_bound(&zero).max_value, 0.0);
    assert_eq!(classical_bound(&zero).argmax_index, 0);

    let def = FunctionalDef {
        name: "bob-zero".into(),
        description: None,
        terms: vec![TermDef {
            coefficient: 1.0,
            event: Predicate::eq(Expr::Var(Variable::B), Expr::Const(0)),
            given: [(Variable::Y, 0)].into_iter().collect(),
            average: None,
        }],
    };
    let r = classical_bound(&LinearFunctional::compile(&def).unwrap());
    assert_eq!(r.max_value, 1.0);
    assert_eq!(r.argmax.bob & 1, 0);
}

#[test]
fn bound_dominates_random_strategies() {
    let f = LinearFunctional::vbc();
    let bound = classical_bound(&f).max_value;
    let space = StrategySpace::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let s = space.strategy(rng.random_range(0..space.len()));
        assert!(evaluate_functional(&strategy_behavior(&s), &f) <= bound);
    }
}

#[test]
fn ideal_switch_is_outside_the_polytope() {
    let ideal = compute_behavior(&NoiseModel::IDEAL).unwrap();
    let r = membership(&ideal).unwrap();
    assert!(!r.feasible);
    let inf = r.infeasibility.unwrap();
    assert!(inf.max_violation > 1e-6);
    assert!(inf.behavior_value > inf.vertex_max);
}

#[test]
fn unentangled_switch_is_inside_the_polytope() {
    let noise = NoiseModel::new(1.0, 0.0, 1.0).unwrap();
    let b = compute_behavior(&noise).unwrap();
    assert!(evaluate_vbc(&b).total <= 1.75);
    let r = membership(&b).unwrap();
    assert!(r.feasible);
    let sum: f64 = r.certificate.iter().map(|w| w.weight).sum();
    assert!((sum - 1.0).abs() < 1e-9);
    assert!(r.certificate.iter().all(|w| w.weight >= 0.0));
    let mixture = r.mixture(&StrategySpace::default());
    assert!(max_cell_error(&mixture, b.cells()) < 1e-9);
}

#[test]
fn random_vertex_mixtures_are_feasible() {
    let space = StrategySpace::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let v1 = strategy_behavior(&space.strategy(rng.random_range(0..space.len())));
        let v2 = strategy_behavior(&space.strategy(rng.random_range(0..space.len())));
        let mix = v1.mix(&v2, rng.random::<f64>()).unwrap();
        let r = membership(&mix).unwrap();
        assert!(r.feasible);
        assert!(r.max_residual < 1e-9);
        assert!(max_cell_error(&r.mixture(&space), mix.cells()) < 1e-9);
    }
}

#[test]
fn noisy_mixture_of_ideal_and_uniform_crosses_the_boundary() {
    let ideal = compute_behavior(&NoiseModel::IDEAL).unwrap();
    let uniform = Behavior::new([1.0 / NUM_OUTCOMES as f64; NUM_CELLS]).unwrap();
    assert!(membership(&uniform).unwrap().feasible);
    let weak = ideal.mix(&uniform, 0.2).unwrap();
    assert!(membership(&weak).unwrap().feasible);
}

#[test]
fn every_vertex_has_a_unit_certificate() {
    let set = VertexSet::default_set();
    let space = *set.space();
    for v in (0..set.len()).step_by(1013) {
        let s = space.strategy(set.strategy_index(v));
        let b = strategy_behavior(&s);
        let r = membership(&b).unwrap();
        assert!(r.feasible);
        assert_eq!(r.certificate.len(), 1);
        assert!(max_cell_error(&r.mixture(&space), b.cells()) < 1e-9);
    }
}

#[test]
fn vertices_put_unit_mass_on_one_outcome() {
    let space = StrategySpace::default();
    let b = strategy_behavior(&space.strategy(99_999));
    for s in Settings::all() {
        let ones = Outcome::all().filter(|&o| b.prob(s, o) == 1.0).count();
        assert_eq!(ones, 1);
    }
}
