use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mft"))
        .args(args)
        .output()
        .expect("run mft")
}

fn mft_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mft"))
        .args(args)
        .env(key, value)
        .output()
        .expect("run mft")
}

fn kv(out: &Output) -> HashMap<String, String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(map: &HashMap<String, String>, key: &str) -> f64 {
    map[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key}={} is not a number", map[key]))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn solve_manager_interior() {
    let out = mft(&["solve", "manager", "--preset", "example1", "--theta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let m = kv(&out);
    assert_eq!(m["outcome"], "Interior");
    assert!((num(&m, "z_star") - (10.0f64 / 9.0).powf(0.25)).abs() < 1e-12);
    assert!((num(&m, "v_worker") - 14.0 / 6.0).abs() < 1e-12);
    assert_eq!(m["global_max_verified"], "true");
}

#[test]
fn solve_manager_sentinels() {
    let out = mft(&["solve", "manager", "--preset", "example1", "--theta", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let m = kv(&out);
    assert_eq!(m["outcome"], "NoEquilibrium");
    assert_eq!(m["z_star"], "NOEQ");
}

#[test]
fn solve_planner_example1() {
    let out = mft(&["solve", "planner", "--preset", "example1"]);
    assert_eq!(out.status.code(), Some(0));
    let m = kv(&out);
    assert_eq!(m["outcome"], "UniquePositive");
    assert!((num(&m, "z_star") - 0.904).abs() < 1e-3);
    assert!((num(&m, "v_central") - 1.716).abs() < 1e-3);
}

#[test]
fn solve_with_all_flags_and_no_preset() {
    let out = mft(&[
        "solve",
        "partnership",
        "--K",
        "6.666666666666667",
        "--p",
        "2",
        "--eps",
        "1",
        "--beta",
        "0.6",
        "--theta",
        "0.5",
        "--c",
        "1",
        "--kappa0",
        "2",
        "--k",
        "1",
        "--delta",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = kv(&out);
    assert!((num(&m, "z_star") - 0.522).abs() < 1e-3);
    assert!((num(&m, "v_partner") - 6.247).abs() < 1e-3);
}

#[test]
fn solve_unclassified_exits_2() {
    let out = mft(&[
        "solve",
        "partnership",
        "--preset",
        "example1",
        "--eps",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(kv(&out)["outcome"], "Unclassified");
}

#[test]
fn invalid_input_exits_1() {
    let out = mft(&["solve", "manager", "--preset", "example1", "--theta", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("theta"));

    let out = mft(&["solve", "planner", "--preset", "example1", "--delta", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("delta"));

    assert_eq!(
        mft(&["solve", "planner", "--K", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        mft(&["solve", "planner", "--preset", "example9"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(mft(&["solve", "nobody"]).status.code(), Some(1));
    assert_eq!(mft(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mft(&["--help"]).status.code(), Some(0));
}

/// Linearly interpolated points where `a - b` changes sign between adjacent
/// numeric rows.
fn csv_crossings(csv: &str, a: &str, b: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ia = header.iter().position(|h| *h == a).unwrap();
    let ib = header.iter().position(|h| *h == b).unwrap();
    let rows: Vec<(f64, Option<f64>)> = lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            let gap = match (cells[ia].parse::<f64>(), cells[ib].parse::<f64>()) {
                (Ok(x), Ok(y)) => Some(x - y),
                _ => None,
            };
            (cells[0].parse().unwrap(), gap)
        })
        .collect();
    rows.windows(2)
        .filter_map(|w| match (w[0], w[1]) {
            ((x0, Some(g0)), (x1, Some(g1))) if g0.signum() != g1.signum() => {
                Some(x0 + (x1 - x0) * g0 / (g0 - g1))
            }
            _ => None,
        })
        .collect()
}

#[test]
fn sweep_example1_crossings() {
    let out = mft(&["sweep", "--preset", "example1", "--steps", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 201);
    let wc = csv_crossings(&csv, "v_worker", "v_central");
    assert_eq!(wc.len(), 1);
    assert!(wc[0] > 0.63 && wc[0] < 0.64, "{wc:?}");
    let wp = csv_crossings(&csv, "v_worker", "v_partner");
    assert_eq!(wp.len(), 1);
    assert!((wp[0] - 0.862).abs() < 1e-3, "{wp:?}");
}

#[test]
fn sweep_example2_crossing() {
    let out = mft(&["sweep", "--preset", "example2", "--steps", "400"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("beta,"));
    let wp = csv_crossings(&csv, "v_worker", "v_partner");
    assert_eq!(wp.len(), 1);
    assert!((wp[0] - 0.1374).abs() < 1e-3, "{wp:?}");
}

#[test]
fn sweep_writes_csv_and_svgs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.csv");
    let out = mft(&[
        "sweep",
        "--preset",
        "example1",
        "--steps",
        "50",
        "--out",
        path.to_str().unwrap(),
        "--svg",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(&path).unwrap();
    assert!(csv.contains("NOEQ"));
    assert!(!csv.contains('\r'));
    for stem in ["theta_values.svg", "theta_sizes.svg"] {
        let svg = fs::read_to_string(dir.path().join(stem)).unwrap();
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("href"));
    }
}

#[test]
fn sweep_custom_range_and_bad_inputs() {
    let out = mft(&[
        "sweep", "--preset", "example1", "--var", "beta", "--from", "0.1", "--to", "0.5",
        "--steps", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let first: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((first - 0.15).abs() < 1e-15);

    let out = mft(&[
        "sweep", "--preset", "example1", "--from", "-0.5", "--to", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = mft(&["sweep", "--preset", "example1", "--steps", "0"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("out.csv");
    let out = mft(&[
        "sweep",
        "--preset",
        "example1",
        "--steps",
        "5",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_planner_payoff() {
    let out = mft(&[
        "simulate", "--preset", "example1", "--regime", "planner", "--teams", "1000000", "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = kv(&out);
    let gap = (num(&m, "mean_member_payoff") - 14.0 / 3.0).abs();
    assert!(gap < 3.0 * num(&m, "mean_member_payoff_stderr"));
    assert!(num(&m, "ks_distance_vs_rho") < 0.005);
    assert_eq!(m["best_multiplier"], "1");
}

#[test]
fn simulate_is_deterministic_across_threads() {
    let args = [
        "simulate", "--preset", "example1", "--regime", "manager", "--teams", "30000", "--seed",
        "9",
    ];
    let a = mft_env(&args, "MFT_THREADS", "1");
    let b = mft_env(&args, "MFT_THREADS", "4");
    let c = mft(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let m = kv(&a);
    // members keep 1-θ of the rank reward
    let predicted = num(&m, "predicted_member_payoff");
    assert!((predicted - 14.0 / 3.0 * 0.5).abs() < 1e-12);
}

#[test]
fn simulate_single_team_flags_stderr() {
    let out = mft(&["simulate", "--preset", "example1", "--teams", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(kv(&out)["mean_member_payoff_stderr"], "NA");
}

#[test]
fn simulate_rejects_bad_input() {
    assert_eq!(
        mft(&["simulate", "--preset", "example1", "--teams", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        mft_env(
            &["simulate", "--preset", "example1", "--teams", "10"],
            "MFT_THREADS",
            "zero"
        )
        .status
        .code(),
        Some(1)
    );
    // the manager has no equilibrium at θ = 0.3
    let out = mft(&[
        "simulate", "--preset", "example1", "--regime", "manager", "--theta", "0.3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_writes_cdf() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cdf.csv");
    let out = mft(&[
        "simulate",
        "--preset",
        "example2",
        "--regime",
        "partnership",
        "--teams",
        "500",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 501);
    assert!(text.starts_with("tau,empirical_cdf,rho\n"));
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == name)
        .unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap_or(f64::NAN))
        .collect()
}

#[test]
fn figures_into_new_directory() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("a").join("b");
    let out = mft(&[
        "figures",
        "--out",
        target.to_str().unwrap(),
        "--steps",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for i in 1..=4 {
        assert!(Path::new(&target.join(format!("figure{i}.csv"))).exists());
        assert!(Path::new(&target.join(format!("figure{i}.svg"))).exists());
    }
    let fig2 = fs::read_to_string(target.join("figure2.csv")).unwrap();
    assert!(column(&fig2, "z_central")
        .iter()
        .all(|z| (z - 0.904).abs() < 1e-3));
    assert!(column(&fig2, "z_partner")
        .iter()
        .all(|z| (z - 1.368).abs() < 1e-3));
    let fig4 = fs::read_to_string(target.join("figure4.csv")).unwrap();
    assert!(column(&fig4, "z_manager")
        .iter()
        .all(|z| (z - 0.863).abs() < 1e-3));
    let zp = column(&fig4, "z_partner");
    assert!(zp.windows(2).all(|w| w[1] < w[0]));

    let only = dir.path().join("only");
    let out = mft(&[
        "figures",
        "--preset",
        "example2",
        "--out",
        only.to_str().unwrap(),
        "--steps",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!only.join("figure1.csv").exists());
    assert!(only.join("figure3.csv").exists());
}

#[test]
fn figures_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = mft(&["figures", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
