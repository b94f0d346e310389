mod common;

use common::{effort_cost_oracle, ParamSampler};
use mft_core::model::{equilibrium_intensity, rho_closed_form};
use mft_core::simulator::*;
use mft_core::solvers::{expected_rank_reward, manager_objective};
use mft_core::{ModelParams, PowerProfile, TeamSize};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

fn equilibrium_config(params: ModelParams, z: f64, n: usize, seed: u64) -> SimulationConfig {
    let lam =
        equilibrium_intensity(&params, TeamSize::new(z).unwrap(), params.effort_cost).unwrap();
    SimulationConfig::new(n, seed, params, z, lam)
}

fn within(e: &Estimate, target: f64, sigmas: f64) -> bool {
    (e.mean - target).abs() <= sigmas * e.stderr.expect("n >= 2")
}

#[test]
fn draws_are_exact_transforms() {
    let cfg = equilibrium_config(ModelParams::example1(), 1.1, 1, 0);
    let (c, p) = (cfg.intensity.coeff(), cfg.intensity.exponent());
    for i in 0..100 {
        let d = team_draw(17, i, &cfg.intensity);
        let tau = ((p * d.z_exp).exp() - 1.0) / (p * c);
        assert!((d.tau - tau).abs() <= 1e-12 * tau.max(1e-300));
        assert!((d.rank - (1.0 - (-d.z_exp).exp())).abs() < 1e-15);
        assert!((rho_closed_form(&cfg.intensity, d.tau).unwrap().get() - d.rank).abs() < 1e-12);
    }
}

#[test]
fn closed_form_cost_matches_time_integration() {
    let mut sampler = ParamSampler::new(4);
    let m = sampler.params();
    let cfg = equilibrium_config(m, 1.7, 100, 9);
    let member_coeff = cfg.intensity.coeff();
    for i in 0..100 {
        let d = team_draw(cfg.seed, i, &cfg.intensity);
        let closed = member_effort_cost(&cfg, d.z_exp);
        let oracle = effort_cost_oracle(
            m.effort_cost,
            member_coeff,
            cfg.intensity.exponent(),
            cfg.z,
            d.tau,
        );
        assert!(
            (closed - oracle).abs() <= 1e-8 * closed.max(1e-12),
            "{closed} vs {oracle}"
        );
    }
}

#[test]
fn single_team_report() {
    let cfg = equilibrium_config(ModelParams::example1(), 0.9, 1, 5);
    let report = run_simulation(&cfg).unwrap();
    assert_eq!(report.n_teams, 1);
    assert!(report.mean_member_payoff.stderr.is_none());
    assert!(report.mean_team_reward.stderr.is_none());
    let d = team_draw(5, 0, &cfg.intensity);
    assert_eq!(report.empirical_cdf.samples(), &[d.tau]);
}

#[test]
fn zero_teams_rejected() {
    let cfg = equilibrium_config(ModelParams::example1(), 0.9, 0, 5);
    assert!(run_simulation(&cfg).is_err());
}

#[test]
fn deterministic_regardless_of_threads() {
    let cfg = equilibrium_config(ModelParams::example1(), 0.9, 50_000, 77);
    let reference = run_simulation(&cfg).unwrap();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let again = pool.install(|| run_simulation(&cfg)).unwrap();
        assert_eq!(again, reference);
    }
    let small = equilibrium_config(ModelParams::example1(), 0.9, 100, 1);
    let a = empirical_rho_check(&run_simulation(&small).unwrap(), &small.intensity).unwrap();
    let b = empirical_rho_check(&run_simulation(&small).unwrap(), &small.intensity).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn mismatched_intensity_is_detected() {
    let cfg = equilibrium_config(ModelParams::example1(), 0.9, 100_000, 3);
    let report = run_simulation(&cfg).unwrap();
    let wrong = cfg.intensity.scaled(2.0);
    // analytic gap between the two state curves
    let gap = (0..2000)
        .map(|i| {
            let t = 0.002 * i as f64;
            rho_closed_form(&wrong, t).unwrap().get()
                - rho_closed_form(&cfg.intensity, t).unwrap().get()
        })
        .fold(0.0f64, f64::max);
    assert!(gap > 0.05);
    assert!(empirical_rho_check(&report, &wrong).unwrap() > 0.05);
    assert!(empirical_rho_check(&report, &cfg.intensity).unwrap() < 0.01);
}

#[test]
fn payoffs_match_predictions_for_random_parameters() {
    let mut sampler = ParamSampler::new(12);
    for seed in 0..5 {
        let m = sampler.params();
        let z = sampler.uniform(0.3, 3.0);
        let cfg = equilibrium_config(m, z, 200_000, seed);
        let report = run_simulation(&cfg).unwrap();
        let predicted = m.half_gross() * z.powf(-m.division);
        assert!(
            within(&report.mean_member_payoff, predicted, 3.0),
            "{:?} vs {predicted}",
            report.mean_member_payoff
        );
        assert!(within(&report.mean_team_reward, m.pie, 3.0));
    }
}

#[test]
fn rank_uniformity() {
    let cfg = equilibrium_config(ModelParams::example2(), 0.7, 200_000, 8);
    let report = run_simulation(&cfg).unwrap();
    // 99.9% Kolmogorov critical value ≈ 1.949/√n
    assert!(report.rank_uniformity_ks < 1.949 / (200_000f64).sqrt());
}

#[test]
fn deviation_scan_examples() {
    let cfg = equilibrium_config(ModelParams::example1(), 0.9036, 200_000, 2);
    let report = run_simulation(&cfg).unwrap();
    let scan = deviation_payoff_scan(&cfg, &[0.0, 0.5, 1.0, 1.5]).unwrap();
    let free_rider = cfg.params.salary_share * report.mean_member_reward.mean;
    assert!((scan[0].payoff.mean - free_rider).abs() <= 1e-14 * free_rider);
    assert_eq!(best_multiplier(&scan[1..]), Some(1.0));

    // analytic quadratic g(m) = A(β + (1-β)m) - B m², vertex at (1-β)A/(2B)
    let a = report.mean_member_reward.mean;
    let b = report.mean_effort_cost.mean;
    let vertex = (1.0 - cfg.params.salary_share) * a / (2.0 * b);
    assert!((vertex - 1.0).abs() < 0.02);

    // members who over-exert would rather scale down
    let mut doubled = cfg.clone();
    doubled.intensity = cfg.intensity.scaled(2.0);
    let grid: Vec<f64> = (1..=30).map(|i| 0.05 * i as f64).collect();
    let scan = deviation_payoff_scan(&doubled, &grid).unwrap();
    assert!(best_multiplier(&scan).unwrap() < 1.0);
}

#[test]
fn deviating_team_size_matches_expected_rank_reward() {
    // a team of size z among teams of size z*: its rank solves
    // P(rank > x) = (1-x)^γ with γ = (z/z*)^{2-ε}
    let m = ModelParams::example1();
    let z_star = 0.9;
    let n = 200_000;
    for z in [0.5f64, 1.4] {
        let gamma = (z / z_star).powf(2.0 - m.division);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let e: f64 = Exp1.sample(&mut rng);
            let rank = -(-e / gamma).exp_m1();
            let g = common::g(&m, z, rank);
            sum += g;
            sum_sq += g * g;
        }
        let mean = sum / n as f64;
        let stderr = ((sum_sq / n as f64 - mean * mean) / (n as f64 - 1.0)).sqrt();
        let closed = expected_rank_reward(&m, z, z_star).unwrap();
        assert!((mean - closed).abs() < 3.0 * stderr, "{mean} vs {closed}");

        // the manager objective built on it agrees with the simulation too
        let objective = manager_objective(&m, TeamSize::new(z).unwrap(), z_star).unwrap();
        let simulated = m.manager_share * mean * z.powf(m.division) - m.fixed_cost - m.size_cost(z);
        assert!((objective - simulated).abs() < 3.0 * stderr * m.manager_share);
    }
}

#[test]
fn invalid_configs() {
    let mut cfg = equilibrium_config(ModelParams::example1(), 0.9, 10, 0);
    cfg.intensity = PowerProfile::zero(2.0);
    assert!(run_simulation(&cfg).is_err());
    let cfg = equilibrium_config(ModelParams::example1(), 0.9, 10, 0);
    assert!(deviation_payoff_scan(&cfg, &[-1.0]).is_err());
}
