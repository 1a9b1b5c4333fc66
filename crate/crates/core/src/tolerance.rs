//! Numerical tolerances shared by every module.

/// One record holding every tolerance the toolkit compares against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Algebraic identities: Hermiticity, involution, Kraus completeness.
    pub algebraic: f64,
    /// Lower bound on eigenvalues accepted as "positive semidefinite".
    pub positivity: f64,
    /// Per-setting normalization of a behavior.
    pub normalization: f64,
    /// Entry range slack for probabilities.
    pub probability: f64,
    /// Linear-programming feasibility and certificate reproduction.
    pub lp: f64,
    /// Probabilities at or below this are treated as structural zeros by the LP presolve.
    pub lp_zero: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        algebraic: 1e-12,
        positivity: 1e-10,
        normalization: 1e-10,
        probability: 1e-12,
        lp: 1e-9,
        lp_zero: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;
