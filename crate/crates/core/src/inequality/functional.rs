//! Linear functionals over behaviors.
//!
//! A functional is a weighted sum of terms `coefficient · P(event | given)`,
//! where every input not fixed by `given` is averaged uniformly. Terms are
//! compiled once into a 256-entry coefficient vector, so evaluation is a dot
//! product with the behavior table.
//!
//! The declarative form (`FunctionalDef`) deserializes from JSON:
//!
//! ```json
//! { "name": "example",
//!   "terms": [ { "coefficient": 1.0,
//!                "event": { "all": [ { "eq": ["a2", "x1"] }, { "eq": ["b", 0] } ] },
//!                "given": { "y": 0 },
//!                "average": ["x1", "x2", "z"] } ] }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Outcome, Settings, NUM_CELLS, NUM_OUTCOMES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    A1,
    A2,
    B,
    C,
    X1,
    X2,
    Y,
    Z,
}

impl Variable {
    pub const INPUTS: [Variable; 4] = [Variable::X1, Variable::X2, Variable::Y, Variable::Z];

    pub fn is_input(self) -> bool {
        Self::INPUTS.contains(&self)
    }

    fn value(self, s: Settings, o: Outcome) -> u8 {
        match self {
            Variable::A1 => o.a1,
            Variable::A2 => o.a2,
            Variable::B => o.b,
            Variable::C => o.c,
            Variable::X1 => s.x1,
            Variable::X2 => s.x2,
            Variable::Y => s.y,
            Variable::Z => s.z,
        }
    }
}

/// Bit-valued expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expr {
    Var(Variable),
    Const(u8),
    Op(ExprOp),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExprOp {
    Xor(Vec<Expr>),
    And(Vec<Expr>),
}

impl Expr {
    fn eval(&self, s: Settings, o: Outcome) -> u8 {
        match self {
            Expr::Var(v) => v.value(s, o),
            Expr::Const(c) => *c,
            Expr::Op(ExprOp::Xor(args)) => args.iter().fold(0, |acc, e| acc ^ e.eval(s, o)),
            Expr::Op(ExprOp::And(args)) => args.iter().fold(1, |acc, e| acc & e.eval(s, o)),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Expr::Var(_) => Ok(()),
            Expr::Const(c) if *c <= 1 => Ok(()),
            Expr::Const(c) => Err(Error::Config(format!("constant {c} is not a bit"))),
            Expr::Op(ExprOp::Xor(args) | ExprOp::And(args)) => {
                if args.is_empty() {
                    return Err(Error::Config("xor/and needs at least one argument".into()));
                }
                args.iter().try_for_each(Expr::validate)
            }
        }
    }

    fn collect_vars(&self, out: &mut Vec<Variable>) {
        match self {
            Expr::Var(v) => out.push(*v),
            Expr::Const(_) => {}
            Expr::Op(ExprOp::Xor(args) | ExprOp::And(args)) => {
                args.iter().for_each(|e| e.collect_vars(out))
            }
        }
    }
}

/// Boolean event over one cell of the behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predicate {
    Eq(Expr, Expr),
    All(Vec<Predicate>),
    Any(Vec<Predicate>),
    Not(Box<Predicate>),
}

impl Predicate {
    pub fn eq(lhs: Expr, rhs: Expr) -> Self {
        Predicate::Eq(lhs, rhs)
    }

    fn holds(&self, s: Settings, o: Outcome) -> bool {
        match self {
            Predicate::Eq(a, b) => a.eval(s, o) == b.eval(s, o),
            Predicate::All(ps) => ps.iter().all(|p| p.holds(s, o)),
            Predicate::Any(ps) => ps.iter().any(|p| p.holds(s, o)),
            Predicate::Not(p) => !p.holds(s, o),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Predicate::Eq(a, b) => {
                a.validate()?;
                b.validate()
            }
            Predicate::All(ps) | Predicate::Any(ps) => ps.iter().try_for_each(Predicate::validate),
            Predicate::Not(p) => p.validate(),
        }
    }

    fn collect_vars(&self, out: &mut Vec<Variable>) {
        match self {
            Predicate::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Predicate::All(ps) | Predicate::Any(ps) => ps.iter().for_each(|p| p.collect_vars(out)),
            Predicate::Not(p) => p.collect_vars(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDef {
    pub coefficient: f64,
    pub event: Predicate,
    /// Inputs held fixed.
    #[serde(default)]
    pub given: BTreeMap<Variable, u8>,
    /// Inputs averaged uniformly. Defaults to every input not in `given`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub average: Option<Vec<Variable>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDef {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub terms: Vec<TermDef>,
}

impl FunctionalDef {
    /// The VBC expression written as three terms.
    pub fn vbc() -> Self {
        use Expr::{Const, Var};
        use Variable::*;
        let term = |event, given: &[(Variable, u8)], average: &[Variable]| TermDef {
            coefficient: 1.0,
            event,
            given: given.iter().copied().collect(),
            average: Some(average.to_vec()),
        };
        FunctionalDef {
            name: "vbc".into(),
            description: Some("VBC inequality, classical bound 7/4".into()),
            terms: vec![
                term(
                    Predicate::All(vec![
                        Predicate::eq(Var(A2), Var(X1)),
                        Predicate::eq(Var(B), Const(0)),
                    ]),
                    &[(Y, 0)],
                    &[X1, X2, Z],
                ),
                term(
                    Predicate::All(vec![
                        Predicate::eq(Var(A1), Var(X2)),
                        Predicate::eq(Var(B), Const(1)),
                    ]),
                    &[(Y, 0)],
                    &[X1, X2, Z],
                ),
                term(
                    Predicate::eq(
                        Expr::Op(ExprOp::Xor(vec![Var(B), Var(C)])),
                        Expr::Op(ExprOp::And(vec![Var(Y), Var(Z)])),
                    ),
                    &[(X1, 0), (X2, 0)],
                    &[Y, Z],
                ),
            ],
        }
    }
}

/// Compiled functional: one coefficient per behavior cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    name: String,
    coefficients: Box<[f64; NUM_CELLS]>,
    num_terms: usize,
}

impl LinearFunctional {
    pub fn compile(def: &FunctionalDef) -> Result<Self> {
        let mut coefficients = Box::new([0.0; NUM_CELLS]);
        for (t, term) in def.terms.iter().enumerate() {
            let ctx = |msg: String| Error::Config(format!("term {t}: {msg}"));
            if !term.coefficient.is_finite() {
                return Err(ctx("coefficient is not finite".into()));
            }
            term.event.validate().map_err(|e| ctx(e.to_string()))?;
            for (var, value) in &term.given {
                if !var.is_input() {
                    return Err(ctx(format!("cannot condition on output {var:?}")));
                }
                if *value > 1 {
                    return Err(ctx(format!("{var:?} = {value} is not a bit")));
                }
            }
            if let Some(average) = &term.average {
                for var in average {
                    if !var.is_input() {
                        return Err(ctx(format!("cannot average over output {var:?}")));
                    }
                    if term.given.contains_key(var) {
                        return Err(ctx(format!("{var:?} is both conditioned and averaged")));
                    }
                }
                let mut used = Vec::new();
                term.event.collect_vars(&mut used);
                for var in used.into_iter().filter(|v| v.is_input()) {
                    if !term.given.contains_key(&var) && !average.contains(&var) {
                        return Err(ctx(format!(
                            "input {var:?} neither conditioned nor averaged"
                        )));
                    }
                }
            }

            let free = Variable::INPUTS
                .iter()
                .filter(|v| !term.given.contains_key(v))
                .count();
            let weight = term.coefficient / (1u32 << free) as f64;
            for s in Settings::all() {
                let matches = term
                    .given
                    .iter()
                    .all(|(var, value)| var.value(s, Outcome::from_index(0)) == *value);
                if !matches {
                    continue;
                }
                for o in Outcome::all() {
                    if term.event.holds(s, o) {
                        coefficients[s.index() * NUM_OUTCOMES + o.index()] += weight;
                    }
                }
            }
        }
        Ok(Self {
            name: def.name.clone(),
            coefficients,
            num_terms: def.terms.len(),
        })
    }

    pub fn vbc() -> Self {
        Self::compile(&FunctionalDef::vbc()).expect("built-in functional is well formed")
    }

    pub fn from_coefficients(
        name: impl Into<String>,
        coefficients: [f64; NUM_CELLS],
    ) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("coefficients must be finite".into()));
        }
        Ok(Self {
            name: name.into(),
            coefficients: Box::new(coefficients),
            num_terms: 0,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_terms(&self) -> usize {
        self.num_terms
    }

    pub fn coefficients(&self) -> &[f64; NUM_CELLS] {
        &self.coefficients
    }

    /// Value on a deterministic behavior given by one outcome index per setting.
    pub fn evaluate_deterministic(&self, outcomes: &[u8; 16]) -> f64 {
        outcomes
            .iter()
            .enumerate()
            .map(|(s, &o)| self.coefficients[s * NUM_OUTCOMES + o as usize])
            .sum()
    }
}

pub fn evaluate_functional(behavior: &Behavior, f: &LinearFunctional) -> f64 {
    behavior
        .cells()
        .iter()
        .zip(f.coefficients.iter())
        .map(|(p, c)| p * c)
        .sum()
}
