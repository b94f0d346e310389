//! Model parameters and the small value types shared across the crate.

use crate::error::{ModelError, Result};

/// The nine scalar parameters of the two-layer team competition.
///
/// Fields are public for ergonomic construction in tests and sweeps; every
/// entry point that accepts user input runs [`ModelParams::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Total rank-based reward pie `K > 0`.
    pub pie: f64,
    /// Reward convexity `p > 0`.
    pub convexity: f64,
    /// Intra-team division exponent `ε ∈ [0, 1]`.
    pub division: f64,
    /// Fixed-salary proportion `β ∈ [0, 1)`.
    pub salary_share: f64,
    /// Manager share of the team gain `θ ∈ (0, 1)`.
    pub manager_share: f64,
    /// Effort cost coefficient `c > 0`.
    pub effort_cost: f64,
    /// Fixed team cost `κ₀ ≥ 0`.
    pub fixed_cost: f64,
    /// Variable size cost coefficient `k > 0`.
    pub size_coeff: f64,
    /// Variable size cost exponent `δ > 0`.
    pub size_exponent: f64,
}

fn check(ok: bool, name: &'static str, value: f64, bound: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value, bound })
    }
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        pie: f64,
        convexity: f64,
        division: f64,
        salary_share: f64,
        manager_share: f64,
        effort_cost: f64,
        fixed_cost: f64,
        size_coeff: f64,
        size_exponent: f64,
    ) -> Result<Self> {
        let params = Self {
            pie,
            convexity,
            division,
            salary_share,
            manager_share,
            effort_cost,
            fixed_cost,
            size_coeff,
            size_exponent,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.pie > 0.0, "K", self.pie, "K > 0")?;
        check(self.convexity > 0.0, "p", self.convexity, "p > 0")?;
        check(
            (0.0..=1.0).contains(&self.division),
            "eps",
            self.division,
            "0 <= eps <= 1",
        )?;
        check(
            (0.0..1.0).contains(&self.salary_share),
            "beta",
            self.salary_share,
            "0 <= beta < 1",
        )?;
        check(
            self.manager_share > 0.0 && self.manager_share < 1.0,
            "theta",
            self.manager_share,
            "0 < theta < 1",
        )?;
        check(self.effort_cost > 0.0, "c", self.effort_cost, "c > 0")?;
        check(
            self.fixed_cost >= 0.0,
            "kappa0",
            self.fixed_cost,
            "kappa0 >= 0",
        )?;
        check(self.size_coeff > 0.0, "k", self.size_coeff, "k > 0")?;
        check(
            self.size_exponent > 0.0,
            "delta",
            self.size_exponent,
            "delta > 0",
        )?;
        Ok(())
    }

    /// Public-good scenario: `K = 20/3, δ = 4, p = 2, k = 1, β = 0.4, κ₀ = 2,
    /// ε = 0, c = 1`, with the manager share at its midpoint `θ = 0.5`.
    pub fn example1() -> Self {
        Self {
            pie: 20.0 / 3.0,
            convexity: 2.0,
            division: 0.0,
            salary_share: 0.4,
            manager_share: 0.5,
            effort_cost: 1.0,
            fixed_cost: 2.0,
            size_coeff: 1.0,
            size_exponent: 4.0,
        }
    }

    /// Budget scenario: as [`ModelParams::example1`] but `ε = 1`, `θ = 0.5`
    /// and `β = 0.6`.
    pub fn example2() -> Self {
        Self {
            division: 1.0,
            salary_share: 0.6,
            ..Self::example1()
        }
    }

    /// Variable size cost `κ(z) = k z^δ`.
    pub fn size_cost(&self, z: f64) -> f64 {
        self.size_coeff * z.powf(self.size_exponent)
    }

    /// `K(1+β)/2`, the per-member equilibrium payoff of a unit-size team.
    pub fn half_gross(&self) -> f64 {
        0.5 * self.pie * (1.0 + self.salary_share)
    }

    /// Effort cost seen by a worker who keeps `1-θ` of the reward.
    pub fn manager_effective_cost(&self) -> f64 {
        self.effort_cost / (1.0 - self.manager_share)
    }
}

/// Proportion of teams that already completed, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RankFraction(f64);

impl RankFraction {
    pub const TOP: RankFraction = RankFraction(0.0);
    pub const BOTTOM: RankFraction = RankFraction(1.0);

    pub fn new(r: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&r) {
            Ok(Self(r))
        } else {
            Err(ModelError::Domain(format!("rank {r} outside [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Team size in population units. Zero means the team is not assembled.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TeamSize(f64);

impl TeamSize {
    pub const ZERO: TeamSize = TeamSize(0.0);

    pub fn new(z: f64) -> Result<Self> {
        if z >= 0.0 && z.is_finite() {
            Ok(Self(z))
        } else {
            Err(ModelError::Domain(format!(
                "team size {z} must be finite and >= 0"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_assembled(self) -> bool {
        self.0 > 0.0
    }
}

/// The profile `x ↦ a (1-x)^q` on `[0, 1]`.
///
/// Every equilibrium effort and team intensity of the model lies in this
/// family, with `q` equal to the reward convexity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    coeff: f64,
    exponent: f64,
}

impl PowerProfile {
    pub fn new(coeff: f64, exponent: f64) -> Result<Self> {
        if !(coeff >= 0.0 && coeff.is_finite()) {
            return Err(ModelError::Domain(format!(
                "profile coefficient {coeff} must be >= 0"
            )));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(ModelError::Domain(format!(
                "profile exponent {exponent} must be > 0"
            )));
        }
        Ok(Self { coeff, exponent })
    }

    pub fn zero(exponent: f64) -> Self {
        Self {
            coeff: 0.0,
            exponent,
        }
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeff * (1.0 - x).powf(self.exponent)
    }

    /// Multiply the amplitude by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeff: self.coeff * factor,
            exponent: self.exponent,
        }
    }
}
