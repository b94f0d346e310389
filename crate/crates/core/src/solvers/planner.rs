//! A central planner picks one team size for everybody to maximise average
//! member welfare net of per-capita size costs.

use super::verify::{grid_global_max, power_sum_limit_at_zero, scan, Diagnostics, GlobalMaxCheck};
use super::{le, lt, near};
use crate::model::best_response_effort;
use crate::params::{ModelParams, PowerProfile, TeamSize};
use crate::roots::{bisect_newton, expand_until};

/// Where the supremum of the planner objective escapes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoOptimumLimit {
    ZeroPlus,
    Infinity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlannerOutcome {
    NoOptimum(NoOptimumLimit),
    UniqueZero,
    UniquePositive {
        z_star: f64,
        v_central: f64,
        effort: PowerProfile,
    },
    /// Both `0` and `z_star` are optimal; the value is zero.
    ZeroAndPositive {
        z_star: f64,
        v_central: f64,
    },
    AnyNonnegative,
    AnyPositive,
    Unclassified(Diagnostics),
}

impl PlannerOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            PlannerOutcome::NoOptimum(_) => "NoOptimum",
            PlannerOutcome::UniqueZero => "UniqueZero",
            PlannerOutcome::UniquePositive { .. } => "UniquePositive",
            PlannerOutcome::ZeroAndPositive { .. } => "ZeroAndPositive",
            PlannerOutcome::AnyNonnegative => "AnyNonnegative",
            PlannerOutcome::AnyPositive => "AnyPositive",
            PlannerOutcome::Unclassified(_) => "Unclassified",
        }
    }
}

/// `h(z) = K(1+β) z^{-ε}/2 - κ₀/z - k z^{δ-1}` for `z > 0`.
pub fn planner_objective(params: &ModelParams, z: f64) -> f64 {
    params.half_gross() * z.powf(-params.division)
        - params.fixed_cost / z
        - params.size_coeff * z.powf(params.size_exponent - 1.0)
}

fn objective_limit_at_zero(params: &ModelParams) -> f64 {
    power_sum_limit_at_zero(&[
        (params.half_gross(), -params.division),
        (-params.fixed_cost, -1.0),
        (-params.size_coeff, params.size_exponent - 1.0),
    ])
}

/// Grid check that `h` peaks at `z_star` and is at least the zero-size value.
pub fn verify_planner_global_max(params: &ModelParams, z_star: f64) -> GlobalMaxCheck {
    grid_global_max(
        |z| planner_objective(params, z),
        z_star,
        objective_limit_at_zero(params),
        0.0,
    )
}

fn unique_positive(params: &ModelParams, z_star: f64) -> PlannerOutcome {
    let effort = best_response_effort(
        params,
        TeamSize::new(z_star).expect("positive size"),
        params.effort_cost,
    )
    .expect("valid parameters give a valid effort");
    PlannerOutcome::UniquePositive {
        z_star,
        v_central: planner_objective(params, z_star),
        effort,
    }
}

fn unclassified(params: &ModelParams, reason: &str) -> PlannerOutcome {
    let (samples, best) = scan(|z| planner_objective(params, z), 1e-3, 1e3);
    PlannerOutcome::Unclassified(Diagnostics {
        reason: reason.into(),
        numeric_scan: Some(samples),
        best_candidate: best,
    })
}

/// Classify the planner problem.
///
/// Pure public-good (`ε = 0`) and pure budget (`ε = 1`) schemes are fully
/// classified. For `0 < ε < 1` only the two parameter families with a known
/// unique interior optimum are solved, and their optimum is re-checked on a
/// grid; everything else is reported as unclassified with a scan of `h`.
pub fn central_planner_optimum(params: &ModelParams) -> PlannerOutcome {
    let eps = params.division;
    let delta = params.size_exponent;
    let kappa0 = params.fixed_cost;
    let k = params.size_coeff;
    let gross = params.half_gross();

    if near(eps, 0.0) {
        if lt(delta, 1.0) {
            return PlannerOutcome::NoOptimum(NoOptimumLimit::Infinity);
        }
        if near(delta, 1.0) {
            if !near(kappa0, 0.0) {
                return if le(gross, k) {
                    PlannerOutcome::UniqueZero
                } else {
                    PlannerOutcome::NoOptimum(NoOptimumLimit::Infinity)
                };
            }
            return if near(gross, k) {
                PlannerOutcome::AnyNonnegative
            } else if gross < k {
                PlannerOutcome::UniqueZero
            } else {
                PlannerOutcome::AnyPositive
            };
        }
        if near(kappa0, 0.0) {
            return PlannerOutcome::NoOptimum(NoOptimumLimit::ZeroPlus);
        }
        let base = kappa0 / (k * (delta - 1.0));
        let z_star = base.powf(1.0 / delta);
        let threshold = kappa0 * delta / (delta - 1.0) * base.powf(-1.0 / delta);
        return if near(gross, threshold) {
            PlannerOutcome::ZeroAndPositive {
                z_star,
                v_central: 0.0,
            }
        } else if gross > threshold {
            unique_positive(params, z_star)
        } else {
            PlannerOutcome::UniqueZero
        };
    }

    if near(eps, 1.0) {
        return if lt(kappa0, gross) {
            PlannerOutcome::NoOptimum(NoOptimumLimit::ZeroPlus)
        } else {
            PlannerOutcome::UniqueZero
        };
    }

    // mixed allocation, family (a): no fixed cost, sub-linear size cost
    if delta < 1.0 && lt(eps + delta, 1.0) && near(kappa0, 0.0) {
        let z_star = (eps * gross / ((1.0 - delta) * k)).powf(1.0 / (delta + eps - 1.0));
        return checked_mixed(params, z_star, "mixed_family_a_grid_disagreement");
    }
    // family (b): fixed cost, at least linear size cost, enough reward
    if le(1.0, delta) && kappa0 > 0.0 && lt(k + kappa0, gross) {
        let g =
            |z: f64| -eps * gross * z.powf(1.0 - eps) + kappa0 - k * (delta - 1.0) * z.powf(delta);
        let dg = |z: f64| {
            -eps * (1.0 - eps) * gross * z.powf(-eps)
                - k * delta * (delta - 1.0) * z.powf(delta - 1.0)
        };
        let root =
            expand_until(1.0, |z| g(z) < 0.0).and_then(|hi| bisect_newton(g, Some(dg), 0.0, hi));
        return match root {
            Ok(z_star) => checked_mixed(params, z_star, "mixed_family_b_grid_disagreement"),
            Err(_) => unclassified(params, "mixed_family_b_root_not_found"),
        };
    }
    unclassified(params, "mixed_allocation_outside_known_families")
}

fn checked_mixed(params: &ModelParams, z_star: f64, reason: &str) -> PlannerOutcome {
    let check = verify_planner_global_max(params, z_star);
    if check.verified {
        unique_positive(params, z_star)
    } else {
        let mut d = check.diagnostics;
        d.reason = reason.into();
        PlannerOutcome::Unclassified(d)
    }
}
