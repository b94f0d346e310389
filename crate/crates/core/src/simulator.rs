//! Finite-population Monte Carlo check of the mean-field predictions.
//!
//! Each team draws a unit exponential `Z`. Under the symmetric power
//! intensity `C (1-x)^p` the completion time and rank are exact transforms
//! of that draw:
//!
//! ```text
//! τ    = (e^{pZ} - 1) / (pC)
//! rank = 1 - e^{-Z}
//! ```
//!
//! so no time stepping is involved. Members are not simulated one by one: a
//! member's payoff is a deterministic function of its team's draw, and the
//! effort cost integral is closed form, `c·a/(pz)·(1 - e^{-pZ})` with `a` the
//! per-member effort amplitude.
//!
//! Team `i` draws from ChaCha8 stream `i` keyed by the seed, and sums are
//! reduced chunk by chunk in index order, so a report depends only on
//! `(seed, n_teams, inputs)` and never on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::model::{invert_cumulative, rho_closed_form};
use crate::params::{ModelParams, PowerProfile};

/// Teams per reduction chunk.
const CHUNK: usize = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub n_teams: usize,
    pub seed: u64,
    pub params: ModelParams,
    /// Common team size.
    pub z: f64,
    /// Team-level intensity `λ = z·α`.
    pub intensity: PowerProfile,
    /// Multiplier on the effort of a single probe member.
    pub member_deviation: f64,
    /// Fraction of the rank reward paid to members (`1 - θ` under a manager).
    pub reward_share: f64,
}

impl SimulationConfig {
    pub fn new(
        n_teams: usize,
        seed: u64,
        params: ModelParams,
        z: f64,
        intensity: PowerProfile,
    ) -> Self {
        Self {
            n_teams,
            seed,
            params,
            z,
            intensity,
            member_deviation: 1.0,
            reward_share: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_teams == 0 {
            return Err(ModelError::Domain("n_teams must be >= 1".into()));
        }
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(ModelError::Domain(format!(
                "team size {} must be > 0",
                self.z
            )));
        }
        if !(self.intensity.coeff() > 0.0) {
            return Err(ModelError::Domain(
                "simulation needs a positive intensity".into(),
            ));
        }
        if !(self.member_deviation >= 0.0 && self.member_deviation.is_finite()) {
            return Err(ModelError::Domain(format!(
                "member deviation {} must be >= 0",
                self.member_deviation
            )));
        }
        if !(self.reward_share > 0.0 && self.reward_share <= 1.0) {
            return Err(ModelError::Domain(format!(
                "reward share {} must lie in (0, 1]",
                self.reward_share
            )));
        }
        Ok(())
    }
}

/// One team's draw and its exact transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationDraw {
    pub z_exp: f64,
    pub tau: f64,
    pub rank: f64,
}

impl SimulationDraw {
    pub fn from_exponential(z_exp: f64, intensity: &PowerProfile) -> Self {
        let tau = invert_cumulative(intensity, z_exp).unwrap_or(f64::INFINITY);
        Self {
            z_exp,
            tau,
            rank: -(-z_exp).exp_m1(),
        }
    }
}

/// Draw for team `index`.
pub fn team_draw(seed: u64, index: u64, intensity: &PowerProfile) -> SimulationDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let z_exp: f64 = Exp1.sample(&mut rng);
    SimulationDraw::from_exponential(z_exp, intensity)
}

/// Sample mean with its standard error. `stderr` is `None` for fewer than two
/// samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(mut self, other: Moments) -> Moments {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    fn estimate(&self) -> Estimate {
        let mean = self.sum / self.n;
        let stderr = (self.n >= 2.0).then(|| {
            let var = ((self.sum_sq - self.n * mean * mean) / (self.n - 1.0)).max(0.0);
            (var / self.n).sqrt()
        });
        Estimate { mean, stderr }
    }
}

/// Empirical distribution of completion times.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        Self { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `<= t`.
    pub fn eval(&self, t: f64) -> f64 {
        let count = self.sorted.partition_point(|&x| x <= t);
        count as f64 / self.sorted.len() as f64
    }

    /// Exact Kolmogorov–Smirnov distance to a continuous CDF.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub n_teams: usize,
    pub empirical_cdf: EmpiricalCdf,
    /// Exact sup-norm distance between the empirical completion-time CDF and
    /// the mean-field state `ρ(t)`.
    pub ks_distance_vs_rho: f64,
    /// Team gain `K(1+p)(1-rank)^p` before any division among members.
    pub mean_team_reward: Estimate,
    /// Per-member reward `G_z(rank)` times the member share.
    pub mean_member_reward: Estimate,
    pub mean_member_payoff: Estimate,
    pub mean_effort_cost: Estimate,
    pub probe_member_payoff: Estimate,
    /// Kolmogorov–Smirnov distance of the ranks to Uniform(0, 1).
    pub rank_uniformity_ks: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkStats {
    team_reward: Moments,
    member_reward: Moments,
    payoff: Moments,
    cost: Moments,
    probe: Moments,
}

impl ChunkStats {
    fn merge(self, other: ChunkStats) -> ChunkStats {
        ChunkStats {
            team_reward: self.team_reward.merge(other.team_reward),
            member_reward: self.member_reward.merge(other.member_reward),
            payoff: self.payoff.merge(other.payoff),
            cost: self.cost.merge(other.cost),
            probe: self.probe.merge(other.probe),
        }
    }
}

/// Per-member effort cost `c ∫₀^τ α(ρ(t))² dt` of a team whose draw is `z_exp`.
pub fn member_effort_cost(config: &SimulationConfig, z_exp: f64) -> f64 {
    let p = config.intensity.exponent();
    let member_coeff = config.intensity.coeff() / config.z;
    config.params.effort_cost * member_coeff / (p * config.z) * -(-p * z_exp).exp_m1()
}

/// Member reward `share · G_z(rank)`.
fn member_reward(config: &SimulationConfig, rank: f64) -> f64 {
    config.reward_share * crate::model::reward_unchecked(&config.params, config.z, rank)
}

fn simulate_draws(config: &SimulationConfig) -> (Vec<SimulationDraw>, ChunkStats) {
    let n = config.n_teams;
    let beta = config.params.salary_share;
    let m = config.member_deviation;
    let chunks: Vec<(Vec<SimulationDraw>, ChunkStats)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n);
            let mut stats = ChunkStats::default();
            let mut draws = Vec::with_capacity(end - start);
            for i in start..end {
                let d = team_draw(config.seed, i as u64, &config.intensity);
                let gain = config.params.pie
                    * (1.0 + config.params.convexity)
                    * (1.0 - d.rank).powf(config.params.convexity);
                let g = member_reward(config, d.rank);
                let cost = member_effort_cost(config, d.z_exp);
                stats.team_reward.push(gain);
                stats.member_reward.push(g);
                stats.cost.push(cost);
                stats.payoff.push(g - cost);
                stats
                    .probe
                    .push(g * (beta + (1.0 - beta) * m) - m * m * cost);
                draws.push(d);
            }
            (draws, stats)
        })
        .collect();
    let mut all = Vec::with_capacity(n);
    let mut total = ChunkStats::default();
    for (draws, stats) in chunks {
        all.extend(draws);
        total = total.merge(stats);
    }
    (all, total)
}

/// Simulate `n_teams` teams playing the configured intensity.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let (draws, stats) = simulate_draws(config);
    let cdf = EmpiricalCdf::new(draws.iter().map(|d| d.tau).collect());
    let intensity = config.intensity;
    let ks = cdf.ks_distance(|t| {
        rho_closed_form(&intensity, t)
            .map(|r| r.get())
            .unwrap_or(1.0)
    });
    let ranks = EmpiricalCdf::new(draws.iter().map(|d| d.rank).collect());
    let rank_ks = ranks.ks_distance(|u| u.clamp(0.0, 1.0));
    Ok(SimulationReport {
        n_teams: config.n_teams,
        empirical_cdf: cdf,
        ks_distance_vs_rho: ks,
        mean_team_reward: stats.team_reward.estimate(),
        mean_member_reward: stats.member_reward.estimate(),
        mean_member_payoff: stats.payoff.estimate(),
        mean_effort_cost: stats.cost.estimate(),
        probe_member_payoff: stats.probe.estimate(),
        rank_uniformity_ks: rank_ks,
    })
}

/// Points in the time grid of [`empirical_rho_check`].
pub const RHO_CHECK_POINTS: usize = 1000;

/// Largest gap between the empirical completion-time CDF and `ρ(t)` under
/// `intensity`, over times at which `ρ` crosses `j/1001`, `j = 1..=1000`.
pub fn empirical_rho_check(report: &SimulationReport, intensity: &PowerProfile) -> Result<f64> {
    if intensity.is_zero() {
        return Err(ModelError::Domain(
            "rho check needs a positive intensity".into(),
        ));
    }
    let p = intensity.exponent();
    let c = intensity.coeff();
    let mut worst = 0.0f64;
    for j in 1..=RHO_CHECK_POINTS {
        let level = j as f64 / (RHO_CHECK_POINTS + 1) as f64;
        // invert ρ(t) = level
        let t = ((1.0 - level).powf(-p) - 1.0) / (p * c);
        let model = rho_closed_form(intensity, t)?.get();
        worst = worst.max((report.empirical_cdf.eval(t) - model).abs());
    }
    Ok(worst)
}

/// Probe-member payoff for one effort multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationPayoff {
    pub multiplier: f64,
    pub payoff: Estimate,
}

/// Mean payoff of a single member who scales the baseline effort by each
/// multiplier while the team intensity stays put.
///
/// All multipliers are evaluated on the same team draws.
pub fn deviation_payoff_scan(
    config: &SimulationConfig,
    multipliers: &[f64],
) -> Result<Vec<DeviationPayoff>> {
    config.validate()?;
    if multipliers.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
        return Err(ModelError::Domain(
            "multipliers must be finite and >= 0".into(),
        ));
    }
    let n = config.n_teams;
    let beta = config.params.salary_share;
    let per_chunk: Vec<Vec<Moments>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n);
            let mut acc = vec![Moments::default(); multipliers.len()];
            for i in start..end {
                let d = team_draw(config.seed, i as u64, &config.intensity);
                let g = member_reward(config, d.rank);
                let cost = member_effort_cost(config, d.z_exp);
                for (slot, &m) in acc.iter_mut().zip(multipliers) {
                    slot.push(g * (beta + (1.0 - beta) * m) - m * m * cost);
                }
            }
            acc
        })
        .collect();
    let mut totals = vec![Moments::default(); multipliers.len()];
    for chunk in per_chunk {
        for (t, c) in totals.iter_mut().zip(chunk) {
            *t = t.merge(c);
        }
    }
    Ok(multipliers
        .iter()
        .zip(totals)
        .map(|(&multiplier, m)| DeviationPayoff {
            multiplier,
            payoff: m.estimate(),
        })
        .collect())
}

/// Multiplier with the highest mean payoff.
pub fn best_multiplier(scan: &[DeviationPayoff]) -> Option<f64> {
    scan.iter()
        .max_by(|a, b| a.payoff.mean.total_cmp(&b.payoff.mean))
        .map(|d| d.multiplier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::equilibrium_intensity;
    use crate::params::TeamSize;

    fn config(n: usize) -> SimulationConfig {
        let params = ModelParams::example1();
        let z = 0.9;
        let lam =
            equilibrium_intensity(&params, TeamSize::new(z).unwrap(), params.effort_cost).unwrap();
        SimulationConfig::new(n, 7, params, z, lam)
    }

    #[test]
    fn single_team_matches_transforms() {
        let cfg = config(1);
        let report = run_simulation(&cfg).unwrap();
        assert_eq!(report.mean_member_payoff.stderr, None);
        let d = team_draw(cfg.seed, 0, &cfg.intensity);
        let p = cfg.intensity.exponent();
        let tau = ((p * d.z_exp).exp() - 1.0) / (p * cfg.intensity.coeff());
        assert!((d.tau - tau).abs() <= 1e-12 * tau);
        assert!((d.rank - (1.0 - (-d.z_exp).exp())).abs() < 1e-15);
        assert_eq!(report.empirical_cdf.samples(), &[d.tau]);
        let rho = rho_closed_form(&cfg.intensity, d.tau).unwrap().get();
        assert!((rho - d.rank).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = config(0);
        assert!(run_simulation(&cfg).is_err());
        cfg.n_teams = 10;
        cfg.intensity = PowerProfile::zero(2.0);
        assert!(run_simulation(&cfg).is_err());
        let mut cfg = config(10);
        cfg.reward_share = 0.0;
        assert!(run_simulation(&cfg).is_err());
    }

    #[test]
    fn reproducible_under_fixed_seed() {
        let a = run_simulation(&config(100)).unwrap();
        let b = run_simulation(&config(100)).unwrap();
        assert_eq!(a, b);
        let ra = empirical_rho_check(&a, &config(100).intensity).unwrap();
        let rb = empirical_rho_check(&b, &config(100).intensity).unwrap();
        assert_eq!(ra.to_bits(), rb.to_bits());
    }

    #[test]
    fn free_rider_payoff() {
        let cfg = config(500);
        let report = run_simulation(&cfg).unwrap();
        let scan = deviation_payoff_scan(&cfg, &[0.0]).unwrap();
        let expected = cfg.params.salary_share * report.mean_member_reward.mean;
        assert!((scan[0].payoff.mean - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn ks_of_exact_quantiles_is_half_step() {
        let cdf = EmpiricalCdf::new(vec![0.25, 0.75]);
        assert!((cdf.ks_distance(|x| x) - 0.25).abs() < 1e-15);
        assert_eq!(cdf.eval(0.5), 0.5);
        assert_eq!(cdf.eval(1.0), 1.0);
    }
}
