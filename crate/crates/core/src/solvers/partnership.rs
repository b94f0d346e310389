//! Team size chosen by the members themselves, who share all size costs.

use super::verify::{grid_global_max, power_sum_limit_at_zero, scan, Diagnostics, GlobalMaxCheck};
use super::{le, lt, near};
use crate::model::best_response_effort;
use crate::params::{ModelParams, PowerProfile, TeamSize};
use crate::roots::{bisect_newton, expand_until};
use crate::BOUNDARY_TOL;

#[derive(Debug, Clone, PartialEq)]
pub enum PartnershipOutcome {
    ZeroEquilibrium,
    UniquePositive {
        z_star: f64,
        v_partner: f64,
        effort: PowerProfile,
    },
    Unclassified(Diagnostics),
}

impl PartnershipOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            PartnershipOutcome::ZeroEquilibrium => "ZeroEquilibrium",
            PartnershipOutcome::UniquePositive { .. } => "UniquePositive",
            PartnershipOutcome::Unclassified(_) => "Unclassified",
        }
    }
}

/// Member objective `H(z; z*)` of a team of size `z` facing a population of
/// teams of size `z_star`, both positive.
pub fn partnership_h(params: &ModelParams, z: f64, z_star: f64) -> f64 {
    let p = params.convexity;
    let eps = params.division;
    let gain = params.pie * (1.0 + p) * (1.0 + params.salary_share) * z.powf(2.0 - 2.0 * eps)
        / (2.0 * z_star.powf(2.0 - eps))
        / (p + (z / z_star).powf(2.0 - eps));
    gain - (params.fixed_cost + params.size_cost(z)) / z
}

/// Diagonal value `K(1+β) z^{-ε}/2 - (κ₀ + k z^δ)/z`.
fn diagonal_value(params: &ModelParams, z: f64) -> f64 {
    params.half_gross() * z.powf(-params.division) - (params.fixed_cost + params.size_cost(z)) / z
}

/// `1 - ε - (2-ε)/(2(p+1))`; its sign is the sign of `2p - 2pε - ε`.
fn stationarity_slope(params: &ModelParams) -> f64 {
    let eps = params.division;
    1.0 - eps - (2.0 - eps) / (2.0 * (params.convexity + 1.0))
}

/// First-order condition `∂H/∂z (z*; z*) = 0` rewritten as
/// `K a(ε,p)(1+β) z^{1-ε} - k(δ-1) z^δ + κ₀ = 0`.
fn stationarity(params: &ModelParams, z: f64) -> f64 {
    let a = params.pie * stationarity_slope(params) * (1.0 + params.salary_share);
    let delta = params.size_exponent;
    a * z.powf(1.0 - params.division) - params.size_coeff * (delta - 1.0) * z.powf(delta)
        + params.fixed_cost
}

fn stationarity_derivative(params: &ModelParams, z: f64) -> f64 {
    let eps = params.division;
    let a = params.pie * stationarity_slope(params) * (1.0 + params.salary_share);
    let delta = params.size_exponent;
    a * (1.0 - eps) * z.powf(-eps) - params.size_coeff * delta * (delta - 1.0) * z.powf(delta - 1.0)
}

/// Unique positive root of the first-order condition on the diagonal, for
/// `δ > 1`. This is the only candidate for a positive equilibrium size; it
/// is not certified to be one.
///
/// When the reward term rises (`2p - 2pε - ε > 0`) the condition increases up
/// to its stationary point `x*` and then falls, so the root is bracketed by
/// `[x*, x_hi]` with `x_hi` found by doubling.
pub fn partnership_stationary_size(params: &ModelParams) -> Option<f64> {
    let delta = params.size_exponent;
    if !(delta > 1.0) {
        return None;
    }
    let eps = params.division;
    let slope = stationarity_slope(params);
    let lo = if slope > 0.0 && eps < 1.0 {
        let a = params.pie * slope * (1.0 + params.salary_share) * (1.0 - eps);
        (a / (params.size_coeff * delta * (delta - 1.0))).powf(1.0 / (delta - 1.0 + eps))
    } else {
        0.0
    };
    if !(stationarity(params, lo) > 0.0) {
        return None;
    }
    let hi = expand_until(lo.max(1.0), |z| stationarity(params, z) < 0.0).ok()?;
    bisect_newton(
        |z| stationarity(params, z),
        Some(|z| stationarity_derivative(params, z)),
        lo,
        hi,
    )
    .ok()
}

/// Whether `z* = 0` is an equilibrium, when the sufficient conditions decide it.
fn zero_is_equilibrium(params: &ModelParams) -> Option<bool> {
    let (k_pie, p, beta) = (params.pie, params.convexity, params.salary_share);
    let (kappa0, k, delta) = (params.fixed_cost, params.size_coeff, params.size_exponent);
    let top_value = (1.0 + beta) / 2.0 * k_pie * (1.0 + p);
    if near(params.division, 1.0) {
        return Some(le(top_value, kappa0));
    }
    if !near(params.division, 0.0) {
        return None;
    }
    if near(kappa0, 0.0) {
        return Some(near(delta, 1.0) && le(top_value, k));
    }
    if near(delta, 1.0) {
        // sup over z of top_value - κ₀/z - k is approached as z → ∞
        return Some(le(top_value, k));
    }
    if delta < 1.0 {
        // the objective increases towards top_value > 0
        return Some(false);
    }
    if lt(delta, 2.0) {
        return None;
    }
    // 2^δ κ₀^{δ-1} k δ^δ / ((1+β)K(1+p))^δ / (δ-1)^{δ-1} >= 1, in logs
    let log_ratio = delta * 2f64.ln() + (delta - 1.0) * kappa0.ln() + k.ln() + delta * delta.ln()
        - delta * ((1.0 + beta) * k_pie * (1.0 + p)).ln()
        - (delta - 1.0) * (delta - 1.0).ln();
    Some(log_ratio >= -BOUNDARY_TOL)
}

fn limit_at_zero(params: &ModelParams, z_star: f64) -> f64 {
    let p = params.convexity;
    let eps = params.division;
    power_sum_limit_at_zero(&[
        (
            params.pie * (1.0 + p) * (1.0 + params.salary_share)
                / (2.0 * p * z_star.powf(2.0 - eps)),
            2.0 - 2.0 * eps,
        ),
        (-params.fixed_cost, -1.0),
        (-params.size_coeff, params.size_exponent - 1.0),
    ])
}

/// Grid check that `H(·; z_star)` peaks at `z_star` and beats staying out.
pub fn verify_partnership_global_max(params: &ModelParams, z_star: f64) -> GlobalMaxCheck {
    grid_global_max(
        |z| partnership_h(params, z, z_star),
        z_star,
        limit_at_zero(params, z_star),
        0.0,
    )
}

fn unclassified(params: &ModelParams, reason: &str) -> PartnershipOutcome {
    let (samples, _) = scan(|z| diagonal_value(params, z), 1e-3, 1e3);
    PartnershipOutcome::Unclassified(Diagnostics {
        reason: reason.into(),
        numeric_scan: Some(samples),
        best_candidate: partnership_stationary_size(params),
    })
}

fn accept_positive(params: &ModelParams, z_star: f64) -> PartnershipOutcome {
    let v_partner = diagonal_value(params, z_star);
    if v_partner < -BOUNDARY_TOL {
        return match zero_is_equilibrium(params) {
            Some(true) => PartnershipOutcome::ZeroEquilibrium,
            _ => unclassified(params, "positive_candidate_has_negative_value"),
        };
    }
    let check = verify_partnership_global_max(params, z_star);
    if !check.verified {
        let mut d = check.diagnostics;
        d.reason = format!("grid_check_failed:{}", d.reason);
        return PartnershipOutcome::Unclassified(d);
    }
    let effort = best_response_effort(
        params,
        TeamSize::new(z_star).expect("positive size"),
        params.effort_cost,
    )
    .expect("valid parameters give a valid effort");
    PartnershipOutcome::UniquePositive {
        z_star,
        v_partner,
        effort,
    }
}

/// Classify the partnership regime for the public-good (`ε = 0`) and budget
/// (`ε = 1`) schemes.
///
/// Only the sufficient conditions with a proof behind them are used; any
/// other parameter set is returned as unclassified together with a scan of
/// the diagonal objective and the stationarity candidate, if any.
pub fn partnership_equilibrium(params: &ModelParams) -> PartnershipOutcome {
    let (k_pie, p, beta) = (params.pie, params.convexity, params.salary_share);
    let (kappa0, k, delta) = (params.fixed_cost, params.size_coeff, params.size_exponent);

    if near(params.division, 0.0) {
        if le(3.0, delta) && le(1.0 / 3.0, p) {
            let a = p * k_pie * (1.0 + beta) / (1.0 + p);
            let gamma = |x: f64| a * x + k * (1.0 - delta) * x.powf(delta) + kappa0;
            let dgamma = |x: f64| a + k * delta * (1.0 - delta) * x.powf(delta - 1.0);
            let x_peak = (a / (k * delta * (delta - 1.0))).powf(1.0 / (delta - 1.0));
            let root = expand_until(x_peak, |x| gamma(x) < 0.0)
                .and_then(|hi| bisect_newton(gamma, Some(dgamma), x_peak, hi));
            return match root {
                Ok(z_star) => accept_positive(params, z_star),
                Err(_) => unclassified(params, "root_not_found"),
            };
        }
        return match zero_is_equilibrium(params) {
            Some(true) => PartnershipOutcome::ZeroEquilibrium,
            _ => unclassified(params, "public_good_outside_sufficient_conditions"),
        };
    }

    if near(params.division, 1.0) {
        if zero_is_equilibrium(params) == Some(true) {
            return PartnershipOutcome::ZeroEquilibrium;
        }
        let share = k_pie * (1.0 + beta) / (2.0 * (1.0 + p));
        if le(2.0, delta) && 2.0 * (1.0 + delta) > (1.0 + p).powi(2) && lt(share, kappa0) {
            let z_star = ((kappa0 - share) / (k * (delta - 1.0))).powf(1.0 / delta);
            return accept_positive(params, z_star);
        }
        return unclassified(params, "budget_outside_sufficient_conditions");
    }

    unclassified(params, "mixed_allocation_not_covered")
}

/// Direction of a sequence along a sorted grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
    /// Fewer than two usable grid points.
    Undetermined,
}

/// Relative change below which a size sequence is treated as constant.
pub const CONSTANT_REL_TOL: f64 = 1e-9;

fn direction_of(values: &[f64]) -> Direction {
    if values.len() < 2 {
        return Direction::Undetermined;
    }
    let scale = values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.iter().all(|d| d.abs() <= CONSTANT_REL_TOL * scale) {
        Direction::Constant
    } else if diffs.iter().all(|&d| d > 0.0) {
        Direction::Increasing
    } else if diffs.iter().all(|&d| d < 0.0) {
        Direction::Decreasing
    } else {
        Direction::Mixed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityPoint {
    pub beta: f64,
    pub z_star: f64,
    pub v_partner: f64,
    /// True when the size is a classified equilibrium rather than only the
    /// stationarity candidate.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// Direction implied by the sign of `2p - 2pε - ε`.
    pub predicted: Direction,
    pub size_direction: Direction,
    pub value_direction: Direction,
    /// Whether the sufficient condition for an increasing value holds.
    pub value_increase_predicted: bool,
    pub points: Vec<MonotonicityPoint>,
    /// Grid values that produced no positive size.
    pub excluded: Vec<f64>,
    pub agrees: bool,
}

/// Track the partnership size and value across `beta_grid` and compare the
/// observed directions with the predicted ones.
///
/// For `ε ∈ {0, 1}` each point must be a classified positive equilibrium.
/// For mixed `ε` the classifier has no coverage, so the unique root of the
/// first-order condition is used and marked uncertified.
pub fn partnership_beta_monotonicity(
    params: &ModelParams,
    beta_grid: &[f64],
) -> MonotonicityReport {
    let mut grid: Vec<f64> = beta_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let eps = params.division;
    let p = params.convexity;
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for &beta in &grid {
        if !(0.0..1.0).contains(&beta) {
            excluded.push(beta);
            continue;
        }
        let at = ModelParams {
            salary_share: beta,
            ..*params
        };
        let point = if near(eps, 0.0) || near(eps, 1.0) {
            match partnership_equilibrium(&at) {
                PartnershipOutcome::UniquePositive {
                    z_star, v_partner, ..
                } => Some(MonotonicityPoint {
                    beta,
                    z_star,
                    v_partner,
                    certified: true,
                }),
                _ => None,
            }
        } else {
            partnership_stationary_size(&at).map(|z_star| MonotonicityPoint {
                beta,
                z_star,
                v_partner: diagonal_value(&at, z_star),
                certified: false,
            })
        };
        match point {
            Some(pt) => points.push(pt),
            None => excluded.push(beta),
        }
    }
    let sign = 2.0 * p - 2.0 * p * eps - eps;
    let predicted = if sign.abs() <= BOUNDARY_TOL {
        Direction::Constant
    } else if sign > 0.0 {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    let sizes: Vec<f64> = points.iter().map(|pt| pt.z_star).collect();
    let values: Vec<f64> = points.iter().map(|pt| pt.v_partner).collect();
    let size_direction = direction_of(&sizes);
    let value_direction = direction_of(&values);
    let value_increase_predicted = sign <= BOUNDARY_TOL
        || p * (2.0 - eps) / ((p + 1.0) * (params.size_exponent + eps - 1.0)) <= 1.0;
    let agrees = size_direction == predicted
        && (!value_increase_predicted || value_direction == Direction::Increasing);
    MonotonicityReport {
        predicted,
        size_direction,
        value_direction,
        value_increase_predicted,
        points,
        excluded,
        agrees,
    }
}
