//! `mft`: solve, sweep and simulate mean-field team competitions.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mft_core::model::equilibrium_intensity;
use mft_core::simulator::{
    deviation_payoff_scan, empirical_rho_check, run_simulation, Estimate, SimulationConfig,
};
use mft_core::solvers::{
    central_planner_optimum, manager_equilibrium, partnership_equilibrium,
    verify_manager_global_max, verify_partnership_global_max, verify_planner_global_max,
    Diagnostics, GlobalMaxCheck, ManagerOutcome, PartnershipOutcome, PlannerOutcome,
};
use mft_core::sweep::{
    figure_data, midpoint_grid, FigureData, Preset, SweepTable, SweepVariable, FIGURE_STEPS,
};
use mft_core::{ModelError, ModelParams, PowerProfile, TeamSize};

const EXIT_INVALID: u8 = 1;
const EXIT_UNCLASSIFIED: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "mft", version, about = "Mean-field team competition solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Equilibrium team size and values for one regime.
    Solve {
        #[arg(value_enum)]
        regime: Regime,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compare the three regimes over a grid of theta or beta values.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        /// Swept parameter; defaults to theta for example1 and beta for example2.
        #[arg(long, value_enum)]
        var: Option<Var>,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write `<out>_values.svg` and `<out>_sizes.svg`.
        #[arg(long, requires = "out")]
        svg: bool,
    },
    /// Monte Carlo check of a regime's equilibrium with a finite population.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Regime::Planner)]
        regime: Regime,
        #[arg(long, default_value_t = 100_000)]
        teams: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the empirical completion-time CDF to this CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data and charts of the four comparison figures.
    Figures {
        /// Restrict to one preset's two figures.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = FIGURE_STEPS)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Regime {
    Manager,
    Planner,
    Partnership,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Var {
    Theta,
    Beta,
}

impl From<Var> for SweepVariable {
    fn from(v: Var) -> Self {
        match v {
            Var::Theta => SweepVariable::Theta,
            Var::Beta => SweepVariable::Beta,
        }
    }
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// Start from a named parameter set: example1 or example2.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long = "K", allow_negative_numbers = true)]
    pie: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
}

#[derive(Debug)]
struct Failure(String);

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn parse_preset(name: &str) -> CliResult<Preset> {
    name.parse::<Preset>().map_err(Failure::from)
}

impl ParamArgs {
    fn preset(&self) -> CliResult<Option<Preset>> {
        self.preset.as_deref().map(parse_preset).transpose()
    }

    fn resolve(&self) -> CliResult<ModelParams> {
        let base = self.preset()?.map(Preset::params);
        let pick =
            |flag: Option<f64>, name: &str, from_base: fn(&ModelParams) -> f64| -> CliResult<f64> {
                flag.or_else(|| base.as_ref().map(from_base))
                    .ok_or_else(|| Failure(format!("missing --{name} (or give --preset)")))
            };
        let params = ModelParams {
            pie: pick(self.pie, "K", |m| m.pie)?,
            convexity: pick(self.p, "p", |m| m.convexity)?,
            division: pick(self.eps, "eps", |m| m.division)?,
            salary_share: pick(self.beta, "beta", |m| m.salary_share)?,
            manager_share: pick(self.theta, "theta", |m| m.manager_share)?,
            effort_cost: pick(self.c, "c", |m| m.effort_cost)?,
            fixed_cost: pick(self.kappa0, "kappa0", |m| m.fixed_cost)?,
            size_coeff: pick(self.k, "k", |m| m.size_coeff)?,
            size_exponent: pick(self.delta, "delta", |m| m.size_exponent)?,
        };
        params.validate()?;
        Ok(params)
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}={value}");
}

fn write_params(out: &mut String, m: &ModelParams) {
    kv(out, "K", fmt_f(m.pie));
    kv(out, "p", fmt_f(m.convexity));
    kv(out, "eps", fmt_f(m.division));
    kv(out, "beta", fmt_f(m.salary_share));
    kv(out, "theta", fmt_f(m.manager_share));
    kv(out, "c", fmt_f(m.effort_cost));
    kv(out, "kappa0", fmt_f(m.fixed_cost));
    kv(out, "k", fmt_f(m.size_coeff));
    kv(out, "delta", fmt_f(m.size_exponent));
}

fn write_effort(out: &mut String, effort: &PowerProfile) {
    kv(out, "effort_coeff", fmt_f(effort.coeff()));
    kv(out, "effort_exponent", fmt_f(effort.exponent()));
}

fn write_check(out: &mut String, check: &GlobalMaxCheck) {
    kv(out, "global_max_verified", check.verified);
    if !check.verified {
        kv(out, "verification_reason", &check.diagnostics.reason);
        if let Some(z) = check.diagnostics.best_candidate {
            kv(out, "verification_best_candidate", fmt_f(z));
        }
    }
}

fn write_unclassified(out: &mut String, d: &Diagnostics) {
    kv(out, "reason", &d.reason);
    if let Some(z) = d.best_candidate {
        kv(out, "best_candidate", fmt_f(z));
    }
}

fn solve(regime: Regime, params: &ModelParams) -> (String, u8) {
    let mut out = String::new();
    kv(&mut out, "regime", format!("{regime:?}").to_lowercase());
    write_params(&mut out, params);
    let mut code = 0;
    match regime {
        Regime::Manager => {
            let outcome = manager_equilibrium(params);
            kv(&mut out, "outcome", outcome.label());
            match &outcome {
                ManagerOutcome::ZeroTeam => {
                    kv(&mut out, "z_star", fmt_f(0.0));
                    kv(&mut out, "v_worker", fmt_f(0.0));
                    kv(&mut out, "v_manager", fmt_f(0.0));
                }
                ManagerOutcome::Interior(m) => {
                    kv(&mut out, "z_star", fmt_f(m.z_star));
                    kv(&mut out, "v_worker", fmt_f(m.v_worker));
                    kv(&mut out, "v_manager", fmt_f(m.v_manager));
                    write_effort(&mut out, &m.effort);
                    write_check(&mut out, &verify_manager_global_max(params, m.z_star));
                }
                ManagerOutcome::NoEquilibrium => {
                    kv(&mut out, "z_star", "NOEQ");
                    kv(&mut out, "v_worker", "NOEQ");
                    kv(&mut out, "v_manager", "NOEQ");
                }
            }
        }
        Regime::Planner => {
            let outcome = central_planner_optimum(params);
            kv(&mut out, "outcome", outcome.label());
            match &outcome {
                PlannerOutcome::NoOptimum(limit) => {
                    kv(&mut out, "limit", format!("{limit:?}"));
                    kv(&mut out, "z_star", "NOOPT");
                    kv(&mut out, "v_central", "NOOPT");
                }
                PlannerOutcome::UniqueZero => {
                    kv(&mut out, "z_star", fmt_f(0.0));
                    kv(&mut out, "v_central", fmt_f(0.0));
                }
                PlannerOutcome::UniquePositive {
                    z_star,
                    v_central,
                    effort,
                } => {
                    kv(&mut out, "z_star", fmt_f(*z_star));
                    kv(&mut out, "v_central", fmt_f(*v_central));
                    write_effort(&mut out, effort);
                    write_check(&mut out, &verify_planner_global_max(params, *z_star));
                }
                PlannerOutcome::ZeroAndPositive { z_star, v_central } => {
                    kv(&mut out, "z_star", fmt_f(*z_star));
                    kv(&mut out, "z_star_alt", fmt_f(0.0));
                    kv(&mut out, "v_central", fmt_f(*v_central));
                    write_check(&mut out, &verify_planner_global_max(params, *z_star));
                }
                PlannerOutcome::AnyNonnegative | PlannerOutcome::AnyPositive => {
                    kv(&mut out, "z_star", "NA");
                    kv(&mut out, "v_central", fmt_f(0.0));
                }
                PlannerOutcome::Unclassified(d) => {
                    write_unclassified(&mut out, d);
                    code = EXIT_UNCLASSIFIED;
                }
            }
        }
        Regime::Partnership => {
            let outcome = partnership_equilibrium(params);
            kv(&mut out, "outcome", outcome.label());
            match &outcome {
                PartnershipOutcome::ZeroEquilibrium => {
                    kv(&mut out, "z_star", fmt_f(0.0));
                    kv(&mut out, "v_partner", fmt_f(0.0));
                }
                PartnershipOutcome::UniquePositive {
                    z_star,
                    v_partner,
                    effort,
                } => {
                    kv(&mut out, "z_star", fmt_f(*z_star));
                    kv(&mut out, "v_partner", fmt_f(*v_partner));
                    write_effort(&mut out, effort);
                    write_check(&mut out, &verify_partnership_global_max(params, *z_star));
                }
                PartnershipOutcome::Unclassified(d) => {
                    write_unclassified(&mut out, d);
                    code = EXIT_UNCLASSIFIED;
                }
            }
        }
    }
    (out, code)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}.svg"))
}

fn sweep_figures(table: &SweepTable) -> [FigureData; 2] {
    use mft_core::sweep::Column;
    let var = table.variable.name();
    [
        FigureData {
            file_stem: "values".into(),
            title: format!("Member values against {var}"),
            x_label: var.into(),
            y_label: "value".into(),
            series: vec![
                (Column::VWorker, "V worker".into()),
                (Column::VCentral, "V central".into()),
                (Column::VPartner, "V partner".into()),
            ],
            table: table.clone(),
        },
        FigureData {
            file_stem: "sizes".into(),
            title: format!("Team sizes against {var}"),
            x_label: var.into(),
            y_label: "team size".into(),
            series: vec![
                (Column::ZManager, "z manager".into()),
                (Column::ZCentral, "z central".into()),
                (Column::ZPartner, "z partner".into()),
            ],
            table: table.clone(),
        },
    ]
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    args: &ParamArgs,
    var: Option<Var>,
    from: Option<f64>,
    to: Option<f64>,
    steps: usize,
    out_path: Option<&Path>,
    svg: bool,
) -> CliResult<String> {
    let params = args.resolve()?;
    let preset = args.preset()?;
    let variable = var
        .map(SweepVariable::from)
        .or(preset.map(Preset::variable))
        .ok_or_else(|| Failure("missing --var (or give --preset)".into()))?;
    let (default_from, default_to) = match (preset, variable) {
        (Some(p), v) if p.variable() == v => p.range(),
        _ => variable.domain(),
    };
    let grid = midpoint_grid(
        from.unwrap_or(default_from),
        to.unwrap_or(default_to),
        steps,
    )?;
    let table = SweepTable::compute(&params, variable, &grid)?;
    let csv = table.to_csv_string();
    match out_path {
        None => Ok(csv),
        Some(path) => {
            write_file(path, &csv)?;
            let mut out = String::new();
            kv(&mut out, "csv", path.display());
            if svg {
                for fig in sweep_figures(&table) {
                    let target = sibling(path, &fig.file_stem);
                    write_file(&target, &fig.chart().render())?;
                    kv(&mut out, "svg", target.display());
                }
            }
            kv(&mut out, "rows", table.rows.len());
            Ok(out)
        }
    }
}

fn estimate_lines(out: &mut String, key: &str, e: &Estimate) {
    kv(out, key, fmt_f(e.mean));
    match e.stderr {
        Some(s) => kv(out, &format!("{key}_stderr"), fmt_f(s)),
        None => kv(out, &format!("{key}_stderr"), "NA"),
    }
}

fn simulate(
    args: &ParamArgs,
    regime: Regime,
    teams: usize,
    seed: u64,
    out_path: Option<&Path>,
) -> CliResult<String> {
    let params = args.resolve()?;
    if teams == 0 {
        return Err(Failure("--teams must be >= 1".into()));
    }
    let (z, effective_cost, share) = match regime {
        Regime::Planner => match central_planner_optimum(&params) {
            PlannerOutcome::UniquePositive { z_star, .. }
            | PlannerOutcome::ZeroAndPositive { z_star, .. } => (z_star, params.effort_cost, 1.0),
            other => {
                return Err(Failure(format!(
                    "planner outcome {} has no positive team size",
                    other.label()
                )))
            }
        },
        Regime::Manager => match manager_equilibrium(&params) {
            ManagerOutcome::Interior(m) => (
                m.z_star,
                params.manager_effective_cost(),
                1.0 - params.manager_share,
            ),
            other => {
                return Err(Failure(format!(
                    "manager outcome {} has no positive team size",
                    other.label()
                )))
            }
        },
        Regime::Partnership => match partnership_equilibrium(&params) {
            PartnershipOutcome::UniquePositive { z_star, .. } => (z_star, params.effort_cost, 1.0),
            other => {
                return Err(Failure(format!(
                    "partnership outcome {} has no positive team size",
                    other.label()
                )))
            }
        },
    };
    let intensity = equilibrium_intensity(&params, TeamSize::new(z)?, effective_cost)?;
    let mut config = SimulationConfig::new(teams, seed, params, z, intensity);
    config.reward_share = share;
    let report = run_simulation(&config)?;
    let rho_gap = empirical_rho_check(&report, &intensity)?;
    let scan = deviation_payoff_scan(&config, &[0.5, 0.9, 1.0, 1.1, 1.5])?;
    let predicted = share * params.half_gross() * z.powf(-params.division);

    let mut out = String::new();
    kv(&mut out, "regime", format!("{regime:?}").to_lowercase());
    kv(&mut out, "teams", teams);
    kv(&mut out, "seed", seed);
    kv(&mut out, "z", fmt_f(z));
    kv(&mut out, "intensity_coeff", fmt_f(intensity.coeff()));
    kv(&mut out, "intensity_exponent", fmt_f(intensity.exponent()));
    kv(
        &mut out,
        "ks_distance_vs_rho",
        fmt_f(report.ks_distance_vs_rho),
    );
    kv(&mut out, "rho_grid_gap", fmt_f(rho_gap));
    kv(
        &mut out,
        "rank_uniformity_ks",
        fmt_f(report.rank_uniformity_ks),
    );
    estimate_lines(&mut out, "mean_team_reward", &report.mean_team_reward);
    kv(&mut out, "predicted_team_reward", fmt_f(params.pie));
    estimate_lines(&mut out, "mean_member_reward", &report.mean_member_reward);
    estimate_lines(&mut out, "mean_effort_cost", &report.mean_effort_cost);
    estimate_lines(&mut out, "mean_member_payoff", &report.mean_member_payoff);
    kv(&mut out, "predicted_member_payoff", fmt_f(predicted));
    for d in &scan {
        estimate_lines(
            &mut out,
            &format!("deviation_payoff_m{}", d.multiplier),
            &d.payoff,
        );
    }
    if let Some(m) = mft_core::simulator::best_multiplier(&scan) {
        kv(&mut out, "best_multiplier", m);
    }

    if let Some(path) = out_path {
        let mut csv = String::from("tau,empirical_cdf,rho\n");
        let samples = report.empirical_cdf.samples();
        let n = samples.len() as f64;
        for (i, &t) in samples.iter().enumerate() {
            let rho = mft_core::model::rho_closed_form(&intensity, t)
                .map(|r| r.get())
                .unwrap_or(1.0);
            let _ = writeln!(
                csv,
                "{},{},{}",
                fmt_f(t),
                fmt_f((i + 1) as f64 / n),
                fmt_f(rho)
            );
        }
        write_file(path, &csv)?;
        kv(&mut out, "cdf_csv", path.display());
    }
    Ok(out)
}

fn figures(preset: Option<&str>, steps: usize, dir: &Path) -> CliResult<String> {
    let only = preset.map(parse_preset).transpose()?;
    fs::create_dir_all(dir)
        .map_err(|e| Failure(format!("cannot create {}: {e}", dir.display())))?;
    let mut out = String::new();
    for (i, fig) in figure_data(steps)?.into_iter().enumerate() {
        let fig_preset = if i < 2 {
            Preset::Example1
        } else {
            Preset::Example2
        };
        if only.is_some_and(|p| p != fig_preset) {
            continue;
        }
        let csv = dir.join(format!("{}.csv", fig.file_stem));
        let svg = dir.join(format!("{}.svg", fig.file_stem));
        write_file(&csv, &fig.to_csv_string())?;
        write_file(&svg, &fig.chart().render())?;
        kv(&mut out, "csv", csv.display());
        kv(&mut out, "svg", svg.display());
    }
    Ok(out)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("MFT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        Failure(format!(
            "MFT_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<(String, u8)> {
    configure_threads()?;
    match cli.command {
        Command::Solve { regime, params } => Ok(solve(regime, &params.resolve()?)),
        Command::Sweep {
            params,
            var,
            from,
            to,
            steps,
            out,
            svg,
        } => Ok((
            sweep(&params, var, from, to, steps, out.as_deref(), svg)?,
            0,
        )),
        Command::Simulate {
            params,
            regime,
            teams,
            seed,
            out,
        } => Ok((simulate(&params, regime, teams, seed, out.as_deref())?, 0)),
        Command::Figures { preset, steps, out } => {
            Ok((figures(preset.as_deref(), steps, &out)?, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
