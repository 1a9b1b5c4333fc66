use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Settings};

/// Upper bound for any behavior admitting a definite-order model.
pub const CLASSICAL_BOUND: f64 = 1.75;

/// Largest value attainable by the quantum switch, `3/2 + √2/4`.
pub const QUANTUM_MAX: f64 = 1.5 + SQRT_2 / 4.0;

/// The three terms of the VBC expression and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VbcReport {
    /// `P(a2 = x1, b = 0 | y = 0)`
    pub term1: f64,
    /// `P(a1 = x2, b = 1 | y = 0)`
    pub term2: f64,
    /// `P(b ⊕ c = y·z | x1 = 0, x2 = 0)`
    pub term3: f64,
    pub total: f64,
    pub classical_bound: f64,
    pub quantum_max: f64,
}

impl VbcReport {
    pub fn from_terms(term1: f64, term2: f64, term3: f64) -> Self {
        Self {
            term1,
            term2,
            term3,
            total: term1 + term2 + term3,
            classical_bound: CLASSICAL_BOUND,
            quantum_max: QUANTUM_MAX,
        }
    }

    pub fn violation(&self) -> f64 {
        self.total - CLASSICAL_BOUND
    }
}

/// Evaluates the VBC expression. Inputs not fixed by a term are averaged uniformly.
pub fn evaluate_vbc(behavior: &Behavior) -> VbcReport {
    let mut term1 = 0.0;
    let mut term2 = 0.0;
    for x1 in 0..2u8 {
        for x2 in 0..2u8 {
            for z in 0..2u8 {
                let s = Settings { x1, x2, y: 0, z };
                term1 += behavior.event_prob(s, |o| o.a2 == x1 && o.b == 0);
                term2 += behavior.event_prob(s, |o| o.a1 == x2 && o.b == 1);
            }
        }
    }
    let mut term3 = 0.0;
    for y in 0..2u8 {
        for z in 0..2u8 {
            let s = Settings { x1: 0, x2: 0, y, z };
            term3 += behavior.event_prob(s, |o| (o.b ^ o.c) == (y & z));
        }
    }
    VbcReport::from_terms(term1 / 8.0, term2 / 8.0, term3 / 4.0)
}
