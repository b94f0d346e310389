//! Solvers for two-layer mean-field team competitions.
//!
//! Inside each team a continuum of members contributes effort to the jump
//! intensity of a shared Poisson project; across a continuum of teams the
//! completion times are ranked and rewarded. The crate computes the
//! intra-team equilibrium ([`model`]), the team sizes chosen by a manager,
//! a central planner or a partnership ([`solvers`]), and checks the
//! mean-field predictions against a finite population ([`simulator`]).

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod params;
pub mod quadrature;
pub mod roots;
pub mod simulator;
pub mod solvers;
pub mod svg;
pub mod sweep;

pub use error::{ModelError, Result};
pub use params::{ModelParams, PowerProfile, RankFraction, TeamSize};

/// Absolute tolerance used when evaluating case boundaries of the
/// classification theorems; ties within this band take the equality branch.
pub const BOUNDARY_TOL: f64 = 1e-12;
