//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's numerics: the oracles integrate the
//! underlying differential equations or expectations directly.

#![allow(dead_code)]

use mft_core::ModelParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Classic fourth-order Runge-Kutta for a scalar ODE from `t0` to `t1`.
pub fn rk4(f: impl Fn(f64, f64) -> f64, y0: f64, t0: f64, t1: f64, steps: usize) -> f64 {
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, y + h / 2.0 * k1);
        let k3 = f(t + h / 2.0, y + h / 2.0 * k2);
        let k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    y
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// `G_z(r) = K(1+p)(1-r)^p z^{-ε}`.
pub fn g(params: &ModelParams, z: f64, r: f64) -> f64 {
    params.pie
        * (1.0 + params.convexity)
        * (1.0 - r).powf(params.convexity)
        * z.powf(-params.division)
}

/// Team coefficient of the symmetric equilibrium intensity.
pub fn equilibrium_team_coeff(params: &ModelParams, z: f64, cost: f64) -> f64 {
    (1.0 - params.salary_share)
        * params.pie
        * (1.0 + params.convexity)
        * z.powf(2.0 - params.division)
        / (2.0 * cost)
}

/// Member value from backward integration of
/// `λ(r)(1-r)V' = a z² G V / ... ` written in `s = -ln(1-r)`:
///
/// `dV/ds = (A·G·V - B·G²) / λ`, `A = (1-β)z²/(2c)`, `B = (1-β²)z²/(4c)`,
///
/// started from `V = 0` far enough out that the neglected tail is below 1e-15
/// of the scale.
pub fn member_value_ode(
    params: &ModelParams,
    coeff: f64,
    exponent: f64,
    z: f64,
    r: f64,
    cost: f64,
) -> f64 {
    let beta = params.salary_share;
    let a = (1.0 - beta) * z * z / (2.0 * cost);
    let b = (1.0 - beta * beta) * z * z / (4.0 * cost);
    let p = params.convexity;
    let decay = 2.0 * p - exponent;
    let s_target = -(1.0 - r).ln();
    let s_far = s_target + 36.0 / decay;
    let rhs = |s: f64, v: f64| {
        let x = -(-s).exp_m1();
        let gv = g(params, z, x);
        let lam = coeff * (-exponent * s).exp();
        (a * gv * v - b * gv * gv) / lam
    };
    rk4(rhs, 0.0, s_far, s_target, 40_000)
}

/// `ρ(t)` by RK4 on `ρ' = C(1-ρ)^{q+1}`.
pub fn rho_ode(coeff: f64, exponent: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    rk4(
        |_, r| coeff * (1.0 - r).powf(exponent + 1.0),
        0.0,
        0.0,
        t,
        20_000,
    )
}

/// `E[G_z(ρ*(τ))]` for a team of size `z` among teams of size `z_star`, by
/// integrating the jump-time density over time. Time is mapped to `u ∈ (0,1)`
/// with `t = u/(1-u)` scaled by the population's time constant.
pub fn expected_rank_reward_oracle(params: &ModelParams, z: f64, z_star: f64) -> f64 {
    let p = params.convexity;
    let c_pop = equilibrium_team_coeff(params, z_star, params.effort_cost);
    let c_own = equilibrium_team_coeff(params, z, params.effort_cost);
    let rho = |t: f64| 1.0 - (1.0 + p * c_pop * t).powf(-1.0 / p);
    // ∫_0^t (1-ρ)^p ds
    let cumulative = |t: f64| (1.0 + p * c_pop * t).ln() / (p * c_pop);
    let scale = 1.0 / c_pop;
    let integrand = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let t = scale * u / (1.0 - u);
        let dt_du = scale / ((1.0 - u) * (1.0 - u));
        let r = rho(t);
        let hazard = c_own * (1.0 - r).powf(p);
        let survival = (-c_own * cumulative(t)).exp();
        hazard * survival * g(params, z, r) * dt_du
    };
    simpson(integrand, 0.0, 1.0, 400_000)
}

/// Per-member effort cost of a team that jumps at `tau`, by time integration
/// of `c·α(ρ(t))²` with `α = (C/z)(1-ρ)^q`.
pub fn effort_cost_oracle(cost: f64, coeff: f64, exponent: f64, z: f64, tau: f64) -> f64 {
    let alpha = |t: f64| {
        let r = 1.0 - (1.0 + exponent * coeff * t).powf(-1.0 / exponent);
        coeff / z * (1.0 - r).powf(exponent)
    };
    // the integrand decays like (1+t)^{-2}; integrate in log time for accuracy
    let head = simpson(|t| cost * alpha(t).powi(2), 0.0, tau.min(1e-3), 2_000);
    if tau <= 1e-3 {
        return head;
    }
    head + simpson(
        |s: f64| {
            let t = s.exp();
            cost * alpha(t).powi(2) * t
        },
        1e-3f64.ln(),
        tau.ln(),
        200_000,
    )
}

/// Deterministic stream of random admissible parameter sets.
pub struct ParamSampler {
    rng: ChaCha8Rng,
}

impl ParamSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn params(&mut self) -> ModelParams {
        ModelParams::new(
            self.uniform(0.5, 10.0),
            self.uniform(0.3, 3.0),
            self.uniform(0.0, 1.0),
            self.uniform(0.0, 0.9),
            self.uniform(0.05, 0.95),
            self.uniform(0.3, 3.0),
            self.uniform(0.0, 3.0),
            self.uniform(0.2, 3.0),
            self.uniform(1.1, 6.0),
        )
        .expect("sampled parameters are admissible")
    }
}
