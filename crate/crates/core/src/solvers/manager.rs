//! Team size chosen by a manager who keeps a share `θ` of the team gain and
//! pays every size-related cost.

use super::verify::{grid_global_max, power_sum_limit_at_zero, GlobalMaxCheck};
use super::{le, lt};
use crate::error::{ModelError, Result};
use crate::model::best_response_effort;
use crate::params::{ModelParams, PowerProfile, TeamSize};

#[derive(Debug, Clone, PartialEq)]
pub struct ManagerInterior {
    pub z_star: f64,
    /// Equilibrium effort of a regular worker.
    pub effort: PowerProfile,
    pub v_manager: f64,
    pub v_worker: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManagerOutcome {
    /// Not assembling the team is the unique equilibrium.
    ZeroTeam,
    Interior(ManagerInterior),
    NoEquilibrium,
}

impl ManagerOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            ManagerOutcome::ZeroTeam => "ZeroTeam",
            ManagerOutcome::Interior(_) => "Interior",
            ManagerOutcome::NoEquilibrium => "NoEquilibrium",
        }
    }
}

/// Expected per-member reward `E[G_z(ρ(τ))]` of a team of size `z` when all
/// other teams have size `z_star` and play their equilibrium effort.
///
/// Equals `K(1+p) z^{-ε} / (1 + p (z/z*)^{ε-2})`.
pub fn expected_rank_reward(params: &ModelParams, z: f64, z_star: f64) -> Result<f64> {
    if !(z > 0.0 && z_star > 0.0) {
        return Err(ModelError::Domain(format!(
            "expected rank reward needs positive sizes, got z = {z}, z* = {z_star}"
        )));
    }
    let p = params.convexity;
    let eps = params.division;
    Ok(params.pie * (1.0 + p) * z.powf(-eps) / (1.0 + p * (z / z_star).powf(eps - 2.0)))
}

/// Manager payoff `1{z>0} (θ E[z^ε G_z(ρ(τ))] - κ₀ - k z^δ)` against a
/// population of size `z_star`.
pub fn manager_objective(params: &ModelParams, z: TeamSize, z_star: f64) -> Result<f64> {
    if !(z_star > 0.0) {
        return Err(ModelError::Domain(format!(
            "population size {z_star} must be > 0"
        )));
    }
    if !z.is_assembled() {
        return Ok(0.0);
    }
    Ok(manager_objective_positive(params, z.get(), z_star))
}

fn manager_objective_positive(params: &ModelParams, z: f64, z_star: f64) -> f64 {
    let p = params.convexity;
    let gain = params.pie * (1.0 + p) * params.manager_share
        / (1.0 + p * (z / z_star).powf(params.division - 2.0));
    gain - params.fixed_cost - params.size_cost(z)
}

/// Classify the manager regime into its three exhaustive cases.
pub fn manager_equilibrium(params: &ModelParams) -> ManagerOutcome {
    let (k, p, eps, theta) = (
        params.pie,
        params.convexity,
        params.division,
        params.manager_share,
    );
    let (kappa0, delta) = (params.fixed_cost, params.size_exponent);
    if le(k * (1.0 + p) * theta, kappa0) {
        return ManagerOutcome::ZeroTeam;
    }
    let margin = (1.0 - kappa0 / (k * theta)) * delta;
    let needed = (2.0 - eps) * p / (1.0 + p);
    if lt(margin, needed) {
        return ManagerOutcome::NoEquilibrium;
    }
    let z_star =
        (k * theta * p * (2.0 - eps) / (params.size_coeff * delta * (1.0 + p))).powf(1.0 / delta);
    let effort = best_response_effort(
        params,
        TeamSize::new(z_star).expect("positive size"),
        params.manager_effective_cost(),
    )
    .expect("valid parameters give a valid effort");
    let v_manager = k * theta * (p * (eps + delta - 2.0) + delta) / (delta * (1.0 + p)) - kappa0;
    let v_worker = k * (1.0 - theta) * (1.0 + params.salary_share) / 2.0 * z_star.powf(-eps);
    ManagerOutcome::Interior(ManagerInterior {
        z_star,
        effort,
        v_manager,
        v_worker,
    })
}

/// Grid check that the manager objective against population `z_star` peaks
/// at `z_star` and beats leaving the team unassembled.
pub fn verify_manager_global_max(params: &ModelParams, z_star: f64) -> GlobalMaxCheck {
    let p = params.convexity;
    let eps = params.division;
    // gain ~ K(1+p)θ/p · (z/z*)^{2-ε} near zero
    let limit = power_sum_limit_at_zero(&[
        (
            params.pie * (1.0 + p) * params.manager_share / p * z_star.powf(eps - 2.0),
            2.0 - eps,
        ),
        (-params.fixed_cost, 0.0),
        (-params.size_coeff, params.size_exponent),
    ]);
    grid_global_max(
        |z| manager_objective_positive(params, z, z_star),
        z_star,
        limit,
        0.0,
    )
}
