//! Deterministic definite-order strategies, the classical bound and
//! causal-polytope membership.

mod membership;
mod simplex;
mod strategy;

pub use membership::{
    membership, membership_in, CertificateWeight, Infeasibility, LpStats, MembershipResult,
    VertexSet,
};
pub use strategy::{
    classical_bound, classical_bound_in, classical_bound_range, enumerate_strategies,
    strategy_behavior, BoundResult, DeterministicStrategy, FirstOutcomeDependence, Order,
    StrategySpace,
};
