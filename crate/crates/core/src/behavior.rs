//! The probability table `P(a1, a2, b, c | x1, x2, y, z)`.
//!
//! Cells are addressed as `16 * setting + outcome`, where a setting packs
//! `(x1, x2, y, z)` and an outcome packs `(a1, a2, b, c)`, both with the first
//! listed bit most significant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::TOL;

pub const NUM_SETTINGS: usize = 16;
pub const NUM_OUTCOMES: usize = 16;
pub const NUM_CELLS: usize = NUM_SETTINGS * NUM_OUTCOMES;

/// Inputs of the four parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Settings {
    pub x1: u8,
    pub x2: u8,
    pub y: u8,
    pub z: u8,
}

impl Settings {
    pub fn new(x1: u8, x2: u8, y: u8, z: u8) -> Result<Self> {
        if [x1, x2, y, z].iter().any(|&v| v > 1) {
            return Err(Error::Validation(format!(
                "settings must be bits, got ({x1}, {x2}, {y}, {z})"
            )));
        }
        Ok(Self { x1, x2, y, z })
    }

    pub fn index(self) -> usize {
        ((self.x1 as usize) << 3)
            | ((self.x2 as usize) << 2)
            | ((self.y as usize) << 1)
            | self.z as usize
    }

    pub fn from_index(i: usize) -> Self {
        debug_assert!(i < NUM_SETTINGS);
        Self {
            x1: ((i >> 3) & 1) as u8,
            x2: ((i >> 2) & 1) as u8,
            y: ((i >> 1) & 1) as u8,
            z: (i & 1) as u8,
        }
    }

    pub fn all() -> impl Iterator<Item = Settings> {
        (0..NUM_SETTINGS).map(Settings::from_index)
    }
}

/// Outputs of the four parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub a1: u8,
    pub a2: u8,
    pub b: u8,
    pub c: u8,
}

impl Outcome {
    pub fn index(self) -> usize {
        ((self.a1 as usize) << 3)
            | ((self.a2 as usize) << 2)
            | ((self.b as usize) << 1)
            | self.c as usize
    }

    pub fn from_index(i: usize) -> Self {
        debug_assert!(i < NUM_OUTCOMES);
        Self {
            a1: ((i >> 3) & 1) as u8,
            a2: ((i >> 2) & 1) as u8,
            b: ((i >> 1) & 1) as u8,
            c: (i & 1) as u8,
        }
    }

    pub fn all() -> impl Iterator<Item = Outcome> {
        (0..NUM_OUTCOMES).map(Outcome::from_index)
    }
}

pub fn cell_index(settings: Settings, outcome: Outcome) -> usize {
    settings.index() * NUM_OUTCOMES + outcome.index()
}

/// A validated behavior: every setting carries a normalized distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Behavior {
    table: Box<[f64; NUM_CELLS]>,
}

impl Behavior {
    pub fn new(table: [f64; NUM_CELLS]) -> Result<Self> {
        for (i, &p) in table.iter().enumerate() {
            if !p.is_finite() || !(-TOL.probability..=1.0 + TOL.probability).contains(&p) {
                return Err(Error::Validation(format!(
                    "behavior cell {i} = {p} out of range"
                )));
            }
        }
        for s in 0..NUM_SETTINGS {
            let total: f64 = table[s * NUM_OUTCOMES..(s + 1) * NUM_OUTCOMES].iter().sum();
            if (total - 1.0).abs() > TOL.normalization {
                return Err(Error::Validation(format!(
                    "setting {:?} sums to {total}",
                    Settings::from_index(s)
                )));
            }
        }
        Ok(Self {
            table: Box::new(table),
        })
    }

    /// Behavior that puts all weight on one outcome per setting.
    pub fn deterministic(outcomes: &[u8; NUM_SETTINGS]) -> Self {
        let mut table = [0.0; NUM_CELLS];
        for (s, &o) in outcomes.iter().enumerate() {
            table[s * NUM_OUTCOMES + o as usize] = 1.0;
        }
        Self {
            table: Box::new(table),
        }
    }

    pub fn prob(&self, settings: Settings, outcome: Outcome) -> f64 {
        self.table[cell_index(settings, outcome)]
    }

    pub fn cells(&self) -> &[f64; NUM_CELLS] {
        &self.table
    }

    pub fn distribution(&self, settings: Settings) -> &[f64] {
        let s = settings.index();
        &self.table[s * NUM_OUTCOMES..(s + 1) * NUM_OUTCOMES]
    }

    /// `weight · self + (1 − weight) · other`.
    pub fn mix(&self, other: &Behavior, weight: f64) -> Result<Behavior> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::Validation(format!(
                "mixing weight {weight} outside [0, 1]"
            )));
        }
        let mut table = [0.0; NUM_CELLS];
        for (t, (a, b)) in table
            .iter_mut()
            .zip(self.table.iter().zip(other.table.iter()))
        {
            *t = weight * a + (1.0 - weight) * b;
        }
        Behavior::new(table)
    }

    /// Sums `P(outcome | settings)` over outcomes satisfying `pred`.
    pub fn event_prob(&self, settings: Settings, pred: impl Fn(Outcome) -> bool) -> f64 {
        Outcome::all()
            .filter(|&o| pred(o))
            .map(|o| self.prob(settings, o))
            .sum()
    }
}

impl TryFrom<Vec<f64>> for Behavior {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        let table: [f64; NUM_CELLS] = v
            .try_into()
            .map_err(|v: Vec<f64>| Error::dims(NUM_CELLS, v.len()))?;
        Behavior::new(table)
    }
}

impl From<Behavior> for Vec<f64> {
    fn from(b: Behavior) -> Self {
        b.table.to_vec()
    }
}
