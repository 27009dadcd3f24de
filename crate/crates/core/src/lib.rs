//! Simulation and verification toolkit for a delayed fishery model with
//! time-varying coefficients,
//!
//! ```text
//! N'(t) = [ a(t) / (1 + (N(θ(t)) / K(t))^γ) - b(t) ] N(t),   θ(t) <= t.
//! ```
//!
//! * [`model`]: coefficient functions, right-hand sides, equilibrium and
//!   hypothesis validation.
//! * [`engine`]: method-of-steps integration with dense output.
//! * [`conditions`]: numerical evaluation of the sufficient conditions for
//!   persistence, periodicity, global attraction and local stability.
//! * [`analysis`]: periodic orbits, attraction and local-stability runs,
//!   persistence bounds and parameter sweeps.
//! * [`config`] and [`cli`]: the `fishsim` command-line front end.

// Negated float comparisons below treat NaN as out of range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod conditions;
pub mod config;
pub mod engine;
pub mod model;
pub mod output;
pub mod quadrature;
pub mod report;

pub use engine::{
    dense_eval, integrate, integrate_linear, EngineError, LinearHistory, StepControl, Trajectory,
};
pub use model::{
    equilibrium, hill_fecundity, linearized_rhs, rhs, rhs_log, validate, CoefficientSpec,
    DelaySpec, HistorySpec, ModelError, ModelParams, ProportionalParams,
};
pub use report::{ConditionEntry, ConditionReport, Relation, Verdict};
