//! Causal-polytope membership as a phase-one linear program.
//!
//! Rows are the 256 behavior cells, columns the distinct vertex behaviors.
//! Cells with zero probability are dropped together with every vertex that
//! puts weight on them. Floating-point verdicts are never returned
//! unchecked: a feasible answer must reproduce the behavior within the LP
//! tolerance, and an infeasible one must come with a separating functional
//! that is verified against every vertex. Anything else is a numerical error.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, NUM_CELLS, NUM_OUTCOMES, NUM_SETTINGS};
use crate::causal::simplex::{phase_one, UnitColumns};
use crate::causal::strategy::{DeterministicStrategy, StrategySpace};
use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// Distinct vertex behaviors of a strategy space, sorted by outcome vector.
#[derive(Debug, Clone)]
pub struct VertexSet {
    space: StrategySpace,
    outcomes: Vec<[u8; NUM_SETTINGS]>,
    /// Lowest strategy index producing each vertex.
    first_index: Vec<usize>,
}

impl VertexSet {
    pub fn new(space: StrategySpace) -> Self {
        let mut all: Vec<([u8; NUM_SETTINGS], usize)> = (0..space.len())
            .map(|i| (space.strategy(i).outcomes(), i))
            .collect();
        all.sort_unstable();
        all.dedup_by_key(|(o, _)| *o);
        let (outcomes, first_index) = all.into_iter().unzip();
        Self {
            space,
            outcomes,
            first_index,
        }
    }

    /// Vertex set of the default strategy space, built once.
    pub fn default_set() -> &'static VertexSet {
        static SET: OnceLock<VertexSet> = OnceLock::new();
        SET.get_or_init(|| VertexSet::new(StrategySpace::default()))
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn space(&self) -> &StrategySpace {
        &self.space
    }

    pub fn outcomes(&self, vertex: usize) -> &[u8; NUM_SETTINGS] {
        &self.outcomes[vertex]
    }

    pub fn strategy_index(&self, vertex: usize) -> usize {
        self.first_index[vertex]
    }

    /// Vertices whose every cell is allowed by `allowed[setting]` (a bitmask
    /// over outcomes). Walks the sorted list, skipping whole blocks that share
    /// a forbidden prefix.
    fn supported(&self, allowed: &[u16; NUM_SETTINGS]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.outcomes.len() {
            let o = &self.outcomes[i];
            match (0..NUM_SETTINGS).find(|&s| allowed[s] & (1 << o[s]) == 0) {
                None => {
                    out.push(i);
                    i += 1;
                }
                Some(depth) => {
                    let prefix = &o[..=depth];
                    i += self.outcomes[i..].partition_point(|v| &v[..=depth] == prefix);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateWeight {
    pub strategy_index: usize,
    pub strategy: DeterministicStrategy,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Infeasibility {
    /// Optimal phase-one objective: total artificial slack left over.
    pub max_violation: f64,
    /// Functional `y` with `y·v ≤ vertex_max` on every vertex and
    /// `y·behavior = behavior_value > vertex_max`.
    pub separating_functional: Vec<f64>,
    pub behavior_value: f64,
    pub vertex_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpStats {
    pub rows: usize,
    pub columns: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub feasible: bool,
    /// Convex weights over strategies; empty when infeasible.
    pub certificate: Vec<CertificateWeight>,
    /// Largest cell error of the certificate mixture.
    pub max_residual: f64,
    pub infeasibility: Option<Infeasibility>,
    pub lp: LpStats,
}

impl MembershipResult {
    /// Behavior reproduced by the certificate.
    pub fn mixture(&self, space: &StrategySpace) -> [f64; NUM_CELLS] {
        let mut table = [0.0; NUM_CELLS];
        for w in &self.certificate {
            let outcomes = space.strategy(w.strategy_index).outcomes();
            for (s, &o) in outcomes.iter().enumerate() {
                table[s * NUM_OUTCOMES + o as usize] += w.weight;
            }
        }
        table
    }
}

pub fn membership(behavior: &Behavior) -> Result<MembershipResult> {
    membership_in(behavior, VertexSet::default_set())
}

pub fn membership_in(behavior: &Behavior, vertices: &VertexSet) -> Result<MembershipResult> {
    let cells = behavior.cells();
    let tol = TOL.lp;

    let mut allowed = [0u16; NUM_SETTINGS];
    let mut row_of = [usize::MAX; NUM_CELLS];
    let mut rhs = Vec::new();
    for (cell, &p) in cells.iter().enumerate() {
        if p > TOL.lp_zero {
            allowed[cell / NUM_OUTCOMES] |= 1 << (cell % NUM_OUTCOMES);
            row_of[cell] = rhs.len();
            rhs.push(p);
        }
    }

    let candidates = vertices.supported(&allowed);
    let mut rows = Vec::with_capacity(candidates.len() * NUM_SETTINGS);
    for &v in &candidates {
        for (s, &o) in vertices.outcomes(v).iter().enumerate() {
            rows.push(row_of[s * NUM_OUTCOMES + o as usize] as u32);
        }
    }
    let columns = UnitColumns {
        stride: NUM_SETTINGS,
        rows,
    };
    let solution = phase_one(&columns, &rhs)?;
    let lp = LpStats {
        rows: rhs.len(),
        columns: candidates.len(),
        iterations: solution.iterations,
    };

    if solution.objective <= tol {
        let mut certificate: Vec<CertificateWeight> = solution
            .weights
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|&(j, weight)| {
                let strategy_index = vertices.strategy_index(candidates[j]);
                CertificateWeight {
                    strategy_index,
                    strategy: vertices.space().strategy(strategy_index),
                    weight,
                }
            })
            .collect();
        certificate.sort_by_key(|w| w.strategy_index);
        let mut result = MembershipResult {
            feasible: true,
            certificate,
            max_residual: 0.0,
            infeasibility: None,
            lp,
        };
        let mixture = result.mixture(vertices.space());
        result.max_residual = mixture
            .iter()
            .zip(cells.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let sum: f64 = result.certificate.iter().map(|w| w.weight).sum();
        if result.max_residual > tol || (sum - 1.0).abs() > tol {
            return Err(Error::Numerical(format!(
                "feasible LP verdict failed verification (residual {:.3e}, weight sum {sum})",
                result.max_residual
            )));
        }
        return Ok(result);
    }

    // Extend the duals to all cells. Dropped cells get a large negative weight
    // so vertices touching them cannot reach the behavior's value.
    let scale = solution.duals.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let penalty = -(NUM_SETTINGS as f64 * scale + 1.0);
    let separating_functional: Vec<f64> = row_of
        .iter()
        .map(|&r| {
            if r == usize::MAX {
                penalty
            } else {
                solution.duals[r]
            }
        })
        .collect();
    let behavior_value: f64 = separating_functional
        .iter()
        .zip(cells.iter())
        .map(|(y, p)| y * p)
        .sum();
    let vertex_max = (0..vertices.len())
        .map(|v| {
            vertices
                .outcomes(v)
                .iter()
                .enumerate()
                .map(|(s, &o)| separating_functional[s * NUM_OUTCOMES + o as usize])
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    if behavior_value - vertex_max <= tol {
        return Err(Error::Numerical(format!(
            "infeasible LP verdict is borderline (objective {:.3e}, separation {:.3e})",
            solution.objective,
            behavior_value - vertex_max
        )));
    }
    Ok(MembershipResult {
        feasible: false,
        certificate: Vec::new(),
        max_residual: solution.objective,
        infeasibility: Some(Infeasibility {
            max_violation: solution.objective,
            separating_functional,
            behavior_value,
            vertex_max,
        }),
        lp,
    })
}
