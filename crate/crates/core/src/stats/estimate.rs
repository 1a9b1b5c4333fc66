//! Term estimates with binomial standard errors.
//!
//! Each term is the uniform average of per-setting event frequencies `f_s`,
//! with variance `Σ w² f_s(1 − f_s)/n_s`. The total's error is the
//! quadrature sum of the three term errors. Terms 1 and 2 are disjoint events
//! on the same `y = 0` rounds, and term 3 reuses the `(0, 0, 0, z)` rounds,
//! so the terms are not strictly independent; the report lists this.

use serde::{Deserialize, Serialize};

use crate::behavior::{Outcome, Settings, NUM_CELLS, NUM_OUTCOMES, NUM_SETTINGS};
use crate::error::{Error, Result};
use crate::inequality::{CLASSICAL_BOUND, QUANTUM_MAX};
use crate::stats::counts::CountTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub term1: Estimate,
    pub term2: Estimate,
    pub term3: Estimate,
    pub total: Estimate,
    pub classical_bound: f64,
    pub quantum_max: f64,
    pub sigmas_above_bound: f64,
    pub assumptions: Vec<String>,
}

pub const ASSUMPTIONS: [&str; 3] = [
    "per-setting binomial errors f(1-f)/n",
    "total error is the quadrature sum of term errors",
    "terms share the (x1,x2,y)=(0,0,0) rounds; their correlation is ignored",
];

/// Standard deviations of `total` above the classical bound.
pub fn significance(total: f64, std: f64) -> f64 {
    (total - CLASSICAL_BOUND) / std
}

impl EstimateReport {
    pub fn from_terms(term1: Estimate, term2: Estimate, term3: Estimate) -> Self {
        let total = Estimate {
            value: term1.value + term2.value + term3.value,
            std: (term1.std.powi(2) + term2.std.powi(2) + term3.std.powi(2)).sqrt(),
        };
        Self {
            term1,
            term2,
            term3,
            total,
            classical_bound: CLASSICAL_BOUND,
            quantum_max: QUANTUM_MAX,
            sigmas_above_bound: significance(total.value, total.std),
            assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn term(
    freqs: &[f64; NUM_CELLS],
    sizes: &[u64; NUM_SETTINGS],
    settings: &[Settings],
    event: impl Fn(Settings, Outcome) -> bool,
) -> Result<Estimate> {
    let w = 1.0 / settings.len() as f64;
    let mut value = 0.0;
    let mut var = 0.0;
    for &s in settings {
        let n = sizes[s.index()];
        if n == 0 {
            return Err(Error::InsufficientData(format!(
                "no detected rounds in setting {s:?}"
            )));
        }
        let f: f64 = Outcome::all()
            .filter(|&o| event(s, o))
            .map(|o| freqs[s.index() * NUM_OUTCOMES + o.index()])
            .sum();
        value += w * f;
        var += w * w * f * (1.0 - f) / n as f64;
    }
    Ok(Estimate {
        value,
        std: var.max(0.0).sqrt(),
    })
}

/// Estimates from conditional frequencies and per-setting sample sizes.
pub fn estimate_from_frequencies(
    freqs: &[f64; NUM_CELLS],
    sizes: &[u64; NUM_SETTINGS],
) -> Result<EstimateReport> {
    let y0: Vec<Settings> = Settings::all().filter(|s| s.y == 0).collect();
    let x00: Vec<Settings> = Settings::all().filter(|s| s.x1 == 0 && s.x2 == 0).collect();
    let t1 = term(freqs, sizes, &y0, |s, o| o.a2 == s.x1 && o.b == 0)?;
    let t2 = term(freqs, sizes, &y0, |s, o| o.a1 == s.x2 && o.b == 1)?;
    let t3 = term(freqs, sizes, &x00, |s, o| (o.b ^ o.c) == (s.y & s.z))?;
    Ok(EstimateReport::from_terms(t1, t2, t3))
}

pub fn estimate(counts: &CountTable) -> Result<EstimateReport> {
    let mut sizes = [0u64; NUM_SETTINGS];
    for s in Settings::all() {
        sizes[s.index()] = counts.setting_total(s);
    }
    estimate_from_frequencies(&counts.frequencies(), &sizes)
}
