//! Simulation of a quantum switch with two Alices, Bob and Charlie, and
//! verification of the VBC causal inequality against definite-order,
//! relativistic, free-choice models.
//!
//! The pipeline runs `switch` (exact behaviors) → `inequality` (values and
//! no-signaling checks) → `causal` (classical bound and polytope membership)
//! → `stats` (finite-sample estimates). `spacetime` audits timing assumptions.

pub mod behavior;
pub mod causal;
pub mod error;
pub mod inequality;
pub mod linalg;
pub mod spacetime;
pub mod stats;
pub mod switch;
pub mod tolerance;

pub use behavior::{Behavior, Outcome, Settings};
pub use error::{Error, ErrorCategory, Result};
pub use switch::{compute_behavior, compute_behavior_with_angles, AngleSettings, NoiseModel};
