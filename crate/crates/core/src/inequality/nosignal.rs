//! No-signaling constraints implied by the causal structure.
//!
//! * (i) Bob's input `y` cannot influence the marginal of `(a1, a2, c)`.
//! * (ii) Nobody else's inputs `(x1, x2, z)` can influence Bob's `b`.
//! * (iii) Charlie's input `z` cannot influence `(a1, a2)`.

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Outcome, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoSignalingConstraint {
    /// (i)
    BobToRest,
    /// (ii)
    RestToBob,
    /// (iii)
    CharlieToAlices,
}

/// Settings that must share the same marginal distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonGroup {
    pub settings: Vec<Settings>,
}

impl NoSignalingConstraint {
    pub const ALL: [NoSignalingConstraint; 3] = [
        NoSignalingConstraint::BobToRest,
        NoSignalingConstraint::RestToBob,
        NoSignalingConstraint::CharlieToAlices,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NoSignalingConstraint::BobToRest => "(i) P(a1,a2,c) independent of y",
            NoSignalingConstraint::RestToBob => "(ii) P(b) independent of x1,x2,z",
            NoSignalingConstraint::CharlieToAlices => "(iii) P(a1,a2) independent of z",
        }
    }

    /// Number of cells in the marginal this constraint compares.
    pub fn marginal_size(self) -> usize {
        match self {
            NoSignalingConstraint::BobToRest => 8,
            NoSignalingConstraint::RestToBob => 2,
            NoSignalingConstraint::CharlieToAlices => 4,
        }
    }

    pub fn marginal_cell(self, o: Outcome) -> usize {
        match self {
            NoSignalingConstraint::BobToRest => {
                ((o.a1 as usize) << 2) | ((o.a2 as usize) << 1) | o.c as usize
            }
            NoSignalingConstraint::RestToBob => o.b as usize,
            NoSignalingConstraint::CharlieToAlices => ((o.a1 as usize) << 1) | o.a2 as usize,
        }
    }

    pub fn groups(self) -> Vec<ComparisonGroup> {
        let mut groups = Vec::new();
        match self {
            NoSignalingConstraint::BobToRest => {
                for x1 in 0..2 {
                    for x2 in 0..2 {
                        for z in 0..2 {
                            let settings = (0..2).map(|y| Settings { x1, x2, y, z }).collect();
                            groups.push(ComparisonGroup { settings });
                        }
                    }
                }
            }
            NoSignalingConstraint::RestToBob => {
                for y in 0..2 {
                    let settings = Settings::all().filter(|s| s.y == y).collect();
                    groups.push(ComparisonGroup { settings });
                }
            }
            NoSignalingConstraint::CharlieToAlices => {
                for x1 in 0..2 {
                    for x2 in 0..2 {
                        for y in 0..2 {
                            let settings = (0..2).map(|z| Settings { x1, x2, y, z }).collect();
                            groups.push(ComparisonGroup { settings });
                        }
                    }
                }
            }
        }
        groups
    }

    /// Marginal distribution of this constraint's outputs in one setting.
    pub fn marginal(self, behavior: &Behavior, s: Settings) -> Vec<f64> {
        let mut m = vec![0.0; self.marginal_size()];
        for o in Outcome::all() {
            m[self.marginal_cell(o)] += behavior.prob(s, o);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub constraint: NoSignalingConstraint,
    pub description: String,
    /// Largest spread of any marginal cell across a comparison group.
    pub max_deviation: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub tolerance: f64,
    pub constraints: Vec<ConstraintCheck>,
    pub satisfied: bool,
}

impl NoSignalingReport {
    pub fn check(&self, constraint: NoSignalingConstraint) -> &ConstraintCheck {
        self.constraints
            .iter()
            .find(|c| c.constraint == constraint)
            .expect("every constraint is reported")
    }
}

pub fn check_no_signaling(behavior: &Behavior, tol: f64) -> NoSignalingReport {
    let constraints: Vec<ConstraintCheck> = NoSignalingConstraint::ALL
        .iter()
        .map(|&constraint| {
            let mut max_deviation: f64 = 0.0;
            for group in constraint.groups() {
                let marginals: Vec<Vec<f64>> = group
                    .settings
                    .iter()
                    .map(|&s| constraint.marginal(behavior, s))
                    .collect();
                for cell in 0..constraint.marginal_size() {
                    let (lo, hi) = marginals
                        .iter()
                        .map(|m| m[cell])
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                            (lo.min(v), hi.max(v))
                        });
                    max_deviation = max_deviation.max(hi - lo);
                }
            }
            ConstraintCheck {
                constraint,
                description: constraint.label().to_string(),
                max_deviation,
                satisfied: max_deviation <= tol,
            }
        })
        .collect();
    let satisfied = constraints.iter().all(|c| c.satisfied);
    NoSignalingReport {
        tolerance: tol,
        constraints,
        satisfied,
    }
}
