//! Top-layer team-size regimes: manager, central planner and partnership.

pub mod manager;
pub mod partnership;
pub mod planner;
pub mod verify;

pub use manager::{
    expected_rank_reward, manager_equilibrium, manager_objective, verify_manager_global_max,
    ManagerInterior, ManagerOutcome,
};
pub use partnership::{
    partnership_beta_monotonicity, partnership_equilibrium, partnership_h,
    partnership_stationary_size, verify_partnership_global_max, Direction, MonotonicityPoint,
    MonotonicityReport, PartnershipOutcome,
};
pub use planner::{
    central_planner_optimum, planner_objective, verify_planner_global_max, NoOptimumLimit,
    PlannerOutcome,
};
pub use verify::{Diagnostics, GlobalMaxCheck};

use crate::BOUNDARY_TOL;

/// `a == b` within the boundary tolerance.
pub(crate) fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_TOL
}

/// `a <= b` with ties inside the boundary tolerance counted as equal.
pub(crate) fn le(a: f64, b: f64) -> bool {
    a <= b + BOUNDARY_TOL
}

/// `a < b` by more than the boundary tolerance.
pub(crate) fn lt(a: f64, b: f64) -> bool {
    a < b - BOUNDARY_TOL
}
