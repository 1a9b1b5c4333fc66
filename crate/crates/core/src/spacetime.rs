//! Lab-frame event geometry and causal-requirement checks.
//!
//! This audits declared timing assumptions; it says nothing about whether a
//! particular experiment closed a locality loophole. Margins are reported
//! alongside verdicts so near misses are visible.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Group index of standard telecom fiber near 1550 nm.
pub const DEFAULT_GROUP_INDEX: f64 = 1.468;

const LIGHTLIKE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    pub label: String,
    /// Seconds.
    pub t: f64,
    /// Metres.
    pub position: [f64; 3],
}

impl Event {
    pub fn new(label: impl Into<String>, t: f64, position: [f64; 3]) -> Result<Self> {
        let e = Self {
            label: label.into(),
            t,
            position,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() || self.position.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!(
                "event {:?} has non-finite coordinates",
                self.label
            )));
        }
        Ok(())
    }

    fn distance(&self, other: &Event) -> f64 {
        self.position
            .iter()
            .zip(&other.position)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalType {
    Timelike,
    Spacelike,
    Lightlike,
}

pub fn interval_type(e1: &Event, e2: &Event) -> IntervalType {
    let ct = SPEED_OF_LIGHT * (e2.t - e1.t);
    let time_part = ct * ct;
    let space_part = e1.distance(e2).powi(2);
    let s2 = time_part - space_part;
    if s2.abs() <= LIGHTLIKE_REL_TOL * time_part.max(space_part) {
        IntervalType::Lightlike
    } else if s2 > 0.0 {
        IntervalType::Timelike
    } else {
        IntervalType::Spacelike
    }
}

/// Propagation time through `length` metres of fiber.
pub fn fiber_delay(length: f64, group_index: f64) -> Result<f64> {
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::Config(format!(
            "fiber length {length} must be finite and nonnegative"
        )));
    }
    if !(group_index >= 1.0 && group_index.is_finite()) {
        return Err(Error::Config(format!(
            "group index {group_index} must be at least 1"
        )));
    }
    Ok(length * group_index / SPEED_OF_LIGHT)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Spacelike,
    FirstNotAfterSecond,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalRequirement {
    pub first: String,
    pub second: String,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementCheck {
    pub requirement: CausalRequirement,
    pub interval: IntervalType,
    pub satisfied: bool,
    /// `|Δx| − c|Δt|` in metres for spacelike requirements, `t2 − t1` in
    /// seconds for ordering requirements. Positive means satisfied.
    pub margin: f64,
    pub margin_unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeReport {
    pub checks: Vec<RequirementCheck>,
    pub satisfied: bool,
}

pub fn check_requirements(events: &[Event], reqs: &[CausalRequirement]) -> Result<SpacetimeReport> {
    let mut by_label = HashMap::new();
    for e in events {
        e.validate()?;
        if by_label.insert(e.label.as_str(), e).is_some() {
            return Err(Error::Config(format!(
                "duplicate event label {:?}",
                e.label
            )));
        }
    }
    let lookup = |label: &str| {
        by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown event label {label:?}")))
    };

    let mut checks = Vec::with_capacity(reqs.len());
    for req in reqs {
        if req.first == req.second {
            return Err(Error::Config(format!(
                "requirement relates {:?} to itself",
                req.first
            )));
        }
        let (e1, e2) = (lookup(&req.first)?, lookup(&req.second)?);
        let interval = interval_type(e1, e2);
        let (satisfied, margin, unit) = match req.relation {
            Relation::Spacelike => (
                interval == IntervalType::Spacelike,
                e1.distance(e2) - SPEED_OF_LIGHT * (e2.t - e1.t).abs(),
                "m",
            ),
            Relation::FirstNotAfterSecond => (e1.t <= e2.t, e2.t - e1.t, "s"),
        };
        checks.push(RequirementCheck {
            requirement: req.clone(),
            interval,
            satisfied,
            margin,
            margin_unit: unit.to_string(),
        });
    }
    let satisfied = checks.iter().all(|c| c.satisfied);
    Ok(SpacetimeReport { checks, satisfied })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(label: &str, t: f64, x: f64) -> Event {
        Event::new(label, t, [x, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn interval_examples() {
        assert_eq!(
            interval_type(&ev("a", 0.0, 0.0), &ev("b", 0.0, 3000.0)),
            IntervalType::Spacelike
        );
        assert_eq!(
            interval_type(&ev("a", 0.0, 0.0), &ev("b", 1.0, 0.0)),
            IntervalType::Timelike
        );
        assert_eq!(
            interval_type(
                &ev("a", 0.0, 0.0),
                &ev("b", 3000.0 / SPEED_OF_LIGHT, 3000.0)
            ),
            IntervalType::Lightlike
        );
    }

    #[test]
    fn fiber_delays() {
        assert!((fiber_delay(3000.0, DEFAULT_GROUP_INDEX).unwrap() - 14.69e-6).abs() < 0.01e-6);
        assert_eq!(fiber_delay(0.0, DEFAULT_GROUP_INDEX).unwrap(), 0.0);
        assert!((fiber_delay(200.0, DEFAULT_GROUP_INDEX).unwrap() - 0.979e-6).abs() < 0.001e-6);
        assert!(fiber_delay(-1.0, 1.5).is_err());
        assert!(fiber_delay(1.0, 0.9).is_err());
    }

    #[test]
    fn table_top_bob_is_not_spacelike() {
        let events = [ev("alice", 0.0, 0.0), ev("bob", 20e-6, 3.0)];
        let req = CausalRequirement {
            first: "alice".into(),
            second: "bob".into(),
            relation: Relation::Spacelike,
        };
        let r = check_requirements(&events, &[req]).unwrap();
        assert!(!r.satisfied);
        assert!((r.checks[0].margin - (3.0 - SPEED_OF_LIGHT * 20e-6)).abs() < 1e-6);
    }

    #[test]
    fn unknown_and_self_labels() {
        let events = [ev("a", 0.0, 0.0)];
        let req = |f: &str, s: &str| CausalRequirement {
            first: f.into(),
            second: s.into(),
            relation: Relation::FirstNotAfterSecond,
        };
        assert!(check_requirements(&events, &[req("a", "b")]).is_err());
        assert!(check_requirements(&events, &[req("a", "a")]).is_err());
    }
}
