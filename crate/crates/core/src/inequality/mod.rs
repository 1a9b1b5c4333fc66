//! Evaluation of the VBC inequality and general linear functionals on behaviors.

pub mod functional;
pub mod nosignal;
pub mod optimize;
pub mod vbc;

pub use crate::switch::AngleSettings;
pub use functional::{
    evaluate_functional, Expr, ExprOp, FunctionalDef, LinearFunctional, Predicate, TermDef,
    Variable,
};
pub use nosignal::{
    check_no_signaling, ComparisonGroup, ConstraintCheck, NoSignalingConstraint, NoSignalingReport,
};
pub use optimize::{equivalent_to_canonical, optimize_settings, OptimizeResult};
pub use vbc::{evaluate_vbc, VbcReport, CLASSICAL_BOUND, QUANTUM_MAX};
