//! Deterministic definite-order strategies.
//!
//! A strategy fixes the order of the two Alices and four response functions,
//! each stored as a truth table:
//!
//! * the first Alice's outcome as a function of her own input (2 bits),
//! * the second Alice's outcome as a function of `(x1, x2)` (4 bits, row `2·x1 + x2`),
//! * Charlie's `c` as a function of `(x1, x2, z)` (8 bits, row `4·x1 + 2·x2 + z`),
//! * Bob's `b` as a function of `y` alone (2 bits).
//!
//! Bob is spacelike to everyone, the Alices never see `z`, and the order is a
//! property of the hidden variable only. This is the reconstruction of the
//! definite-order, relativistic, free-choice model class used by the oracle.
//!
//! Strategies are enumerated with the order bit most significant, followed by
//! the first-Alice, second-Alice, Charlie and Bob tables in lexicographic order.

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Outcome, Settings, NUM_SETTINGS};
use crate::inequality::LinearFunctional;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// Alice 1 acts before Alice 2.
    OneThenTwo,
    /// Alice 2 acts before Alice 1.
    TwoThenOne,
}

/// What the first Alice's outcome may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstOutcomeDependence {
    /// A function of her own input.
    #[default]
    OwnInput,
    /// A constant.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub order: Order,
    pub first: u8,
    pub second: u8,
    pub charlie: u8,
    pub bob: u8,
}

fn bit(table: u8, row: u8) -> u8 {
    (table >> row) & 1
}

impl DeterministicStrategy {
    pub fn outcome(&self, s: Settings) -> Outcome {
        let (a1, a2) = match self.order {
            Order::OneThenTwo => (bit(self.first, s.x1), bit(self.second, 2 * s.x1 + s.x2)),
            Order::TwoThenOne => (bit(self.second, 2 * s.x1 + s.x2), bit(self.first, s.x2)),
        };
        Outcome {
            a1,
            a2,
            b: bit(self.bob, s.y),
            c: bit(self.charlie, 4 * s.x1 + 2 * s.x2 + s.z),
        }
    }

    /// Outcome index for every setting.
    pub fn outcomes(&self) -> [u8; NUM_SETTINGS] {
        let mut out = [0u8; NUM_SETTINGS];
        for s in Settings::all() {
            out[s.index()] = self.outcome(s).index() as u8;
        }
        out
    }

    /// Whether each Alice's outcome is computed only from inputs available in
    /// her causal past, as declared by `order`.
    pub fn respects_order(&self) -> bool {
        Settings::all().all(|s| {
            let o = self.outcome(s);
            match self.order {
                Order::OneThenTwo => o.a1 == self.outcome(Settings { x2: s.x2 ^ 1, ..s }).a1,
                Order::TwoThenOne => o.a2 == self.outcome(Settings { x1: s.x1 ^ 1, ..s }).a2,
            }
        })
    }
}

/// Enumerable set of strategies for one choice of first-outcome dependence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StrategySpace {
    pub first_dependence: FirstOutcomeDependence,
}

impl StrategySpace {
    pub fn new(first_dependence: FirstOutcomeDependence) -> Self {
        Self { first_dependence }
    }

    fn first_tables(&self) -> &'static [u8] {
        match self.first_dependence {
            FirstOutcomeDependence::OwnInput => &[0, 1, 2, 3],
            FirstOutcomeDependence::Constant => &[0b00, 0b11],
        }
    }

    pub fn per_order(&self) -> usize {
        self.first_tables().len() * 16 * 256 * 4
    }

    pub fn len(&self) -> usize {
        2 * self.per_order()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn strategy(&self, index: usize) -> DeterministicStrategy {
        assert!(index < self.len(), "strategy index {index} out of range");
        let firsts = self.first_tables();
        let order = if index < self.per_order() {
            Order::OneThenTwo
        } else {
            Order::TwoThenOne
        };
        let rest = index % self.per_order();
        let bob = (rest % 4) as u8;
        let charlie = ((rest / 4) % 256) as u8;
        let second = ((rest / 1024) % 16) as u8;
        let first = firsts[rest / 16384];
        DeterministicStrategy {
            order,
            first,
            second,
            charlie,
            bob,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = DeterministicStrategy> + '_ {
        (0..self.len()).map(move |i| self.strategy(i))
    }
}

/// Every strategy of the default space, in enumeration order.
pub fn enumerate_strategies() -> impl Iterator<Item = DeterministicStrategy> {
    let space = StrategySpace::default();
    (0..space.len()).map(move |i| space.strategy(i))
}

pub fn strategy_behavior(s: &DeterministicStrategy) -> Behavior {
    Behavior::deterministic(&s.outcomes())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub max_value: f64,
    pub argmax: DeterministicStrategy,
    pub argmax_index: usize,
    pub strategies_checked: usize,
}

impl BoundResult {
    /// Combines maxima of disjoint index ranges; ties go to the lower index.
    pub fn merge(self, other: BoundResult) -> BoundResult {
        let take_other = other.max_value > self.max_value
            || (other.max_value == self.max_value && other.argmax_index < self.argmax_index);
        let mut out = if take_other { other } else { self };
        out.strategies_checked = self.strategies_checked + other.strategies_checked;
        out
    }
}

/// Maximum of `f` over strategies with index in `range`.
pub fn classical_bound_range(
    f: &LinearFunctional,
    space: &StrategySpace,
    range: std::ops::Range<usize>,
) -> Option<BoundResult> {
    let mut best: Option<BoundResult> = None;
    for index in range.clone() {
        let s = space.strategy(index);
        let value = f.evaluate_deterministic(&s.outcomes());
        if best.is_none_or(|b| value > b.max_value) {
            best = Some(BoundResult {
                max_value: value,
                argmax: s,
                argmax_index: index,
                strategies_checked: 0,
            });
        }
    }
    best.map(|mut b| {
        b.strategies_checked = range.len();
        b
    })
}

pub fn classical_bound_in(f: &LinearFunctional, space: &StrategySpace) -> BoundResult {
    classical_bound_range(f, space, 0..space.len()).expect("strategy space is never empty")
}

/// Maximum of `f` over all deterministic strategies of the default space.
pub fn classical_bound(f: &LinearFunctional) -> BoundResult {
    classical_bound_in(f, &StrategySpace::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{check_no_signaling, evaluate_vbc};

    #[test]
    fn space_sizes() {
        assert_eq!(StrategySpace::default().len(), 131_072);
        assert_eq!(
            StrategySpace::new(FirstOutcomeDependence::Constant).len(),
            65_536
        );
    }

    #[test]
    fn first_strategy_is_all_zero() {
        let s = enumerate_strategies().next().unwrap();
        assert_eq!(s.order, Order::OneThenTwo);
        assert_eq!((s.first, s.second, s.charlie, s.bob), (0, 0, 0, 0));
        let b = strategy_behavior(&s);
        for set in Settings::all() {
            assert_eq!(b.prob(set, Outcome::from_index(0)), 1.0);
        }
    }

    #[test]
    fn index_decoding_is_lexicographic() {
        let space = StrategySpace::default();
        let s = space.strategy(1);
        assert_eq!(s.bob, 1);
        let s = space.strategy(4);
        assert_eq!((s.charlie, s.bob), (1, 0));
        let s = space.strategy(65_536);
        assert_eq!(s.order, Order::TwoThenOne);
        let s = space.strategy(65_535);
        assert_eq!((s.first, s.second, s.charlie, s.bob), (3, 15, 255, 3));
    }

    #[test]
    fn heralding_strategy_term1() {
        // Alice 1 first, a2 = x1, b = 0 when y = 0.
        let s = DeterministicStrategy {
            order: Order::OneThenTwo,
            first: 0,
            second: 0b1100,
            charlie: 0,
            bob: 0,
        };
        let r = evaluate_vbc(&strategy_behavior(&s));
        assert_eq!(r.term1, 1.0);
        assert_eq!(r.term2, 0.0);
    }

    #[test]
    fn strategies_respect_order_and_no_signaling() {
        let space = StrategySpace::default();
        for index in (0..space.len()).step_by(97) {
            let s = space.strategy(index);
            assert!(s.respects_order());
            assert!(check_no_signaling(&strategy_behavior(&s), 0.0).satisfied);
        }
    }

    #[test]
    fn merge_prefers_lower_index_on_ties() {
        let f = LinearFunctional::vbc();
        let space = StrategySpace::default();
        let a = classical_bound_range(&f, &space, 0..1000).unwrap();
        let b = classical_bound_range(&f, &space, 1000..2000).unwrap();
        let whole = classical_bound_range(&f, &space, 0..2000).unwrap();
        assert_eq!(a.merge(b), whole);
        assert_eq!(b.merge(a), whole);
    }
}
