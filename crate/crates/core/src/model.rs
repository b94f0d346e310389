//! Intra-team layer: reward, state dynamics and the member value function.
//!
//! All team intensities and efforts live in the power family
//! `a (1-x)^q` (see [`PowerProfile`]), which lets the state ODE, the
//! cumulative intensity and the inner integral of the value function be
//! written in closed form.

use crate::error::{ModelError, Result};
use crate::params::{ModelParams, PowerProfile, RankFraction, TeamSize};
use crate::quadrature::{adaptive_simpson, QuadOptions};

/// Rank-based per-member reward `G_z(r) = K(1+p)(1-r)^p z^{-ε}`.
pub fn reward(params: &ModelParams, z: TeamSize, r: RankFraction) -> Result<f64> {
    if !z.is_assembled() {
        return Err(ModelError::Domain(
            "reward is undefined for an unassembled team (z = 0)".into(),
        ));
    }
    Ok(reward_unchecked(params, z.get(), r.get()))
}

pub(crate) fn reward_unchecked(params: &ModelParams, z: f64, r: f64) -> f64 {
    params.pie
        * (1.0 + params.convexity)
        * (1.0 - r).powf(params.convexity)
        * z.powf(-params.division)
}

/// Fraction of teams completed by time `t` when every team runs `intensity`.
///
/// Solves `ρ' = C (1-ρ)^{q+1}`, `ρ(0) = 0`, i.e. `ρ(t) = 1 - (1 + qCt)^{-1/q}`.
pub fn rho_closed_form(intensity: &PowerProfile, t: f64) -> Result<RankFraction> {
    if !(t >= 0.0) {
        return Err(ModelError::Domain(format!("time {t} must be >= 0")));
    }
    if intensity.is_zero() {
        return RankFraction::new(0.0);
    }
    let q = intensity.exponent();
    let rho = if t.is_infinite() {
        1.0
    } else {
        -(-(q * intensity.coeff() * t).ln_1p() / q).exp_m1()
    };
    RankFraction::new(rho.clamp(0.0, 1.0))
}

/// `Λ(t) = ∫₀ᵗ λ(ρ(s)) ds = ln(1 + qCt) / q`.
pub fn cumulative_intensity(intensity: &PowerProfile, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(ModelError::Domain(format!("time {t} must be >= 0")));
    }
    let q = intensity.exponent();
    Ok((q * intensity.coeff() * t).ln_1p() / q)
}

/// Time at which the cumulative intensity reaches `level`.
///
/// Returns `f64::INFINITY` when the intensity is zero and `level > 0`: the
/// jump never happens and the team takes the bottom rank.
pub fn invert_cumulative(intensity: &PowerProfile, level: f64) -> Result<f64> {
    if !(level >= 0.0) {
        return Err(ModelError::Domain(format!("level {level} must be >= 0")));
    }
    if level == 0.0 {
        return Ok(0.0);
    }
    if intensity.is_zero() {
        return Ok(f64::INFINITY);
    }
    let q = intensity.exponent();
    Ok((q * level).exp_m1() / (q * intensity.coeff()))
}

/// Member best response to co-workers and itself, `α_z(r) = (1-β) z G_z(r) / (2c)`.
///
/// `effective_cost` is `c`, `c/(1-θ)` in the manager regime, or the harmonic
/// mean cost of a heterogeneous team. An unassembled team exerts no effort.
pub fn best_response_effort(
    params: &ModelParams,
    z: TeamSize,
    effective_cost: f64,
) -> Result<PowerProfile> {
    check_cost(effective_cost)?;
    if !z.is_assembled() {
        return Ok(PowerProfile::zero(params.convexity));
    }
    let z = z.get();
    let coeff = (1.0 - params.salary_share)
        * params.pie
        * (1.0 + params.convexity)
        * z.powf(1.0 - params.division)
        / (2.0 * effective_cost);
    PowerProfile::new(coeff, params.convexity)
}

/// Team intensity `z·α_z` when every member plays the equilibrium effort.
pub fn equilibrium_intensity(
    params: &ModelParams,
    z: TeamSize,
    effective_cost: f64,
) -> Result<PowerProfile> {
    Ok(best_response_effort(params, z, effective_cost)?.scaled(z.get()))
}

/// Equilibrium value of a team member at rank `r` when every other team runs
/// intensity `lambda`.
///
/// The outer integral of the explicit solution is evaluated by adaptive
/// quadrature after the substitution `u = (1-x)^{2p-q}`, which makes the
/// integrand bounded; the inner integral is closed form for power profiles.
pub fn member_value(
    params: &ModelParams,
    lambda: &PowerProfile,
    z: TeamSize,
    r: RankFraction,
    effective_cost: f64,
) -> Result<f64> {
    check_cost(effective_cost)?;
    if !z.is_assembled() {
        return Ok(0.0);
    }
    if lambda.is_zero() {
        if r.get() >= 1.0 {
            return Ok(0.0);
        }
        return zero_lambda_value(params, z, r);
    }
    let p = params.convexity;
    let q = lambda.exponent();
    let s = 2.0 * p - q;
    if !(s > 0.0) {
        return Err(ModelError::Domain(format!(
            "intensity exponent {q} is not admissible: it must be below 2p = {}",
            2.0 * p
        )));
    }
    let r = r.get();
    if r >= 1.0 {
        return Ok(0.0);
    }
    let (k, beta, eps, zv) = (params.pie, params.salary_share, params.division, z.get());
    let a = lambda.coeff();
    let prefactor = (1.0 - beta * beta) / (4.0 * effective_cost)
        * (k * (1.0 + p)).powi(2)
        * zv.powf(2.0 - 2.0 * eps);
    let rate = k * (1.0 + p) * (1.0 - beta) / (2.0 * effective_cost) * zv.powf(2.0 - eps) / a;
    let m = p - q;
    let gap_r = 1.0 - r;
    // ∫_r^x (1-y)^{m-1} dy written in terms of w = 1 - x
    let inner = move |w: f64| -> f64 {
        if m == 0.0 {
            (gap_r / w).ln()
        } else {
            (gap_r.powf(m) - w.powf(m)) / m
        }
    };
    let integrand = |u: f64| -> f64 {
        let w = u.powf(1.0 / s);
        let e = (-rate * inner(w)).exp();
        if e.is_finite() {
            e
        } else {
            0.0
        }
    };
    let upper = gap_r.powf(s);
    let integral = adaptive_simpson(integrand, 0.0, upper, QuadOptions::default());
    Ok(prefactor / (a * s) * integral)
}

/// Closed form of [`member_value`] at the symmetric equilibrium,
/// `K(1+β)/2 · z^{-ε} (1-r)^p`.
pub fn symmetric_member_value(params: &ModelParams, z: TeamSize, r: RankFraction) -> f64 {
    if !z.is_assembled() {
        return 0.0;
    }
    params.half_gross() * z.get().powf(-params.division) * (1.0 - r.get()).powf(params.convexity)
}

/// Member value when the other teams exert no effort: the state is frozen at
/// `r` and the value is `(1+β)/2 · G_z(r)`.
pub fn zero_lambda_value(params: &ModelParams, z: TeamSize, r: RankFraction) -> Result<f64> {
    if r.get() >= 1.0 {
        return Err(ModelError::Domain(
            "frozen-state value requires rank < 1".into(),
        ));
    }
    Ok(0.5 * (1.0 + params.salary_share) * reward(params, z, r)?)
}

/// Effective cost of a heterogeneous team: the weighted harmonic mean
/// `1/c̄ = Σ w_j / c_j / Σ w_j`.
pub fn effective_cost_harmonic(costs: &[(f64, f64)]) -> Result<f64> {
    if costs.is_empty() {
        return Err(ModelError::Domain("cost distribution is empty".into()));
    }
    let mut total_weight = 0.0;
    let mut weighted_inverse = 0.0;
    for &(c, w) in costs {
        if !(c > 0.0 && c.is_finite()) {
            return Err(ModelError::Domain(format!("cost {c} must be > 0")));
        }
        if !(w >= 0.0 && w.is_finite()) {
            return Err(ModelError::Domain(format!("weight {w} must be >= 0")));
        }
        total_weight += w;
        weighted_inverse += w / c;
    }
    if !(total_weight > 0.0) {
        return Err(ModelError::Domain(
            "weights must sum to a positive total".into(),
        ));
    }
    Ok(total_weight / weighted_inverse)
}

fn check_cost(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(ModelError::Domain(format!(
            "effective cost {c} must be > 0"
        )))
    }
}
