use drfcheck_core::spacetime::{
    check_requirements, fiber_delay, interval_type, CausalRequirement, Event, Relation,
    DEFAULT_GROUP_INDEX, SPEED_OF_LIGHT,
};

fn ev(label: &str, t: f64, pos: [f64; 3]) -> Event {
    Event::new(label, t, pos).unwrap()
}

fn req(first: &str, second: &str, relation: Relation) -> CausalRequirement {
    CausalRequirement {
        first: first.into(),
        second: second.into(),
        relation,
    }
}

#[test]
fn two_hundred_metres_is_about_one_microsecond() {
    let d = fiber_delay(200.0, DEFAULT_GROUP_INDEX).unwrap();
    assert!((d - 1e-6).abs() / 1e-6 < 0.03);
}

#[test]
fn fiber_delay_is_linear() {
    let a = fiber_delay(123.0, 1.5).unwrap();
    let b = fiber_delay(456.0, 1.5).unwrap();
    let ab = fiber_delay(579.0, 1.5).unwrap();
    assert!((a + b - ab).abs() < 1e-18);
}

#[test]
fn classification_is_symmetric() {
    let pts = [
        ev("a", 0.0, [0.0; 3]),
        ev("b", 1e-6, [100.0, 0.0, 0.0]),
        ev("c", 2e-6, [0.0, 600.0, 0.0]),
        ev("d", 1e-5, [3000.0, 0.0, 0.0]),
    ];
    for x in &pts {
        for y in &pts {
            assert_eq!(interval_type(x, y), interval_type(y, x));
        }
    }
}

#[test]
fn boundary_just_inside_and_outside() {
    use drfcheck_core::spacetime::IntervalType::*;
    let o = ev("o", 0.0, [0.0; 3]);
    let t = 3000.0 / SPEED_OF_LIGHT;
    assert_eq!(
        interval_type(&o, &ev("x", t, [3000.0, 0.0, 0.0])),
        Lightlike
    );
    assert_eq!(
        interval_type(&o, &ev("x", t * (1.0 + 1e-6), [3000.0, 0.0, 0.0])),
        Timelike
    );
    assert_eq!(
        interval_type(&o, &ev("x", t * (1.0 - 1e-6), [3000.0, 0.0, 0.0])),
        Spacelike
    );
}

#[test]
fn spacelike_bob_satisfied() {
    let d = 3000.0;
    let events = [
        ev("alice1", 0.0, [0.0; 3]),
        ev("alice2", 0.5e-6, [1.0, 0.0, 0.0]),
        ev("charlie", 1e-6, [2.0, 0.0, 0.0]),
        ev("bob", 2e-6, [d, 0.0, 0.0]),
    ];
    let reqs = [
        req("bob", "alice1", Relation::Spacelike),
        req("bob", "alice2", Relation::Spacelike),
        req("bob", "charlie", Relation::Spacelike),
        req("alice1", "charlie", Relation::FirstNotAfterSecond),
        req("alice2", "charlie", Relation::FirstNotAfterSecond),
    ];
    let r = check_requirements(&events, &reqs).unwrap();
    assert!(r.satisfied);
    assert!(r.checks.iter().all(|c| c.margin > 0.0));
}

#[test]
fn verdicts_invariant_under_translation() {
    let base = [
        ev("a", 0.0, [0.0; 3]),
        ev("b", 20e-6, [3.0, 0.0, 0.0]),
        ev("c", 1e-6, [3000.0, 4.0, 0.0]),
    ];
    let reqs = [
        req("a", "b", Relation::Spacelike),
        req("a", "c", Relation::Spacelike),
        req("b", "c", Relation::FirstNotAfterSecond),
    ];
    let r0 = check_requirements(&base, &reqs).unwrap();
    let shifted: Vec<Event> = base
        .iter()
        .map(|e| {
            ev(
                &e.label,
                e.t + 17.0,
                [
                    e.position[0] - 5e3,
                    e.position[1] + 2.0,
                    e.position[2] + 1e4,
                ],
            )
        })
        .collect();
    let r1 = check_requirements(&shifted, &reqs).unwrap();
    for (a, b) in r0.checks.iter().zip(&r1.checks) {
        assert_eq!(a.satisfied, b.satisfied);
        assert_eq!(a.interval, b.interval);
    }
    assert!(!r0.checks[0].satisfied);
    assert!(r0.checks[1].satisfied);
    assert!(!r0.checks[2].satisfied);
}
