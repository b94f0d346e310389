//! Python bindings: `import mft`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mft_core::model;
use mft_core::simulator::{run_simulation, SimulationConfig};
use mft_core::solvers::{self, ManagerOutcome, PartnershipOutcome, PlannerOutcome};
use mft_core::sweep::{midpoint_grid, SweepTable, SweepVariable};
use mft_core::{ModelError, PowerProfile, RankFraction, TeamSize};

fn py_err(e: ModelError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "ModelParams", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: mft_core::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (K, p, eps, beta, theta, c, kappa0, k, delta))]
    #[allow(non_snake_case, clippy::too_many_arguments)]
    fn new(
        K: f64,
        p: f64,
        eps: f64,
        beta: f64,
        theta: f64,
        c: f64,
        kappa0: f64,
        k: f64,
        delta: f64,
    ) -> PyResult<Self> {
        let inner = mft_core::ModelParams::new(K, p, eps, beta, theta, c, kappa0, k, delta)
            .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn example1() -> Self {
        Self {
            inner: mft_core::ModelParams::example1(),
        }
    }

    #[staticmethod]
    fn example2() -> Self {
        Self {
            inner: mft_core::ModelParams::example2(),
        }
    }

    /// Copy with some fields replaced.
    #[pyo3(signature = (**changes))]
    fn replace(&self, changes: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut m = self.inner;
        if let Some(changes) = changes {
            for (key, value) in changes.iter() {
                let key: String = key.extract()?;
                let value: f64 = value.extract()?;
                let slot = match key.as_str() {
                    "K" => &mut m.pie,
                    "p" => &mut m.convexity,
                    "eps" => &mut m.division,
                    "beta" => &mut m.salary_share,
                    "theta" => &mut m.manager_share,
                    "c" => &mut m.effort_cost,
                    "kappa0" => &mut m.fixed_cost,
                    "k" => &mut m.size_coeff,
                    "delta" => &mut m.size_exponent,
                    other => {
                        return Err(PyValueError::new_err(format!(
                            "unknown parameter '{other}'"
                        )))
                    }
                };
                *slot = value;
            }
        }
        m.validate().map_err(py_err)?;
        Ok(Self { inner: m })
    }

    #[getter(K)]
    fn pie(&self) -> f64 {
        self.inner.pie
    }
    #[getter]
    fn p(&self) -> f64 {
        self.inner.convexity
    }
    #[getter]
    fn eps(&self) -> f64 {
        self.inner.division
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.salary_share
    }
    #[getter]
    fn theta(&self) -> f64 {
        self.inner.manager_share
    }
    #[getter]
    fn c(&self) -> f64 {
        self.inner.effort_cost
    }
    #[getter]
    fn kappa0(&self) -> f64 {
        self.inner.fixed_cost
    }
    #[getter]
    fn k(&self) -> f64 {
        self.inner.size_coeff
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.size_exponent
    }

    fn __repr__(&self) -> String {
        let m = &self.inner;
        format!(
            "ModelParams(K={}, p={}, eps={}, beta={}, theta={}, c={}, kappa0={}, k={}, delta={})",
            m.pie,
            m.convexity,
            m.division,
            m.salary_share,
            m.manager_share,
            m.effort_cost,
            m.fixed_cost,
            m.size_coeff,
            m.size_exponent
        )
    }
}

#[pyfunction]
fn reward(params: &PyModelParams, z: f64, r: f64) -> PyResult<f64> {
    let z = TeamSize::new(z).map_err(py_err)?;
    let r = RankFraction::new(r).map_err(py_err)?;
    model::reward(&params.inner, z, r).map_err(py_err)
}

/// `ρ(t)` under the power intensity `coeff·(1-x)^exponent`.
#[pyfunction]
fn rho(coeff: f64, exponent: f64, t: f64) -> PyResult<f64> {
    let lam = PowerProfile::new(coeff, exponent).map_err(py_err)?;
    model::rho_closed_form(&lam, t)
        .map(|r| r.get())
        .map_err(py_err)
}

#[pyfunction]
fn symmetric_member_value(params: &PyModelParams, z: f64, r: f64) -> PyResult<f64> {
    let z = TeamSize::new(z).map_err(py_err)?;
    let r = RankFraction::new(r).map_err(py_err)?;
    Ok(model::symmetric_member_value(&params.inner, z, r))
}

/// Member value by quadrature under an arbitrary power intensity.
#[pyfunction]
fn member_value(
    params: &PyModelParams,
    coeff: f64,
    exponent: f64,
    z: f64,
    r: f64,
) -> PyResult<f64> {
    let lam = PowerProfile::new(coeff, exponent).map_err(py_err)?;
    let z = TeamSize::new(z).map_err(py_err)?;
    let r = RankFraction::new(r).map_err(py_err)?;
    model::member_value(&params.inner, &lam, z, r, params.inner.effort_cost).map_err(py_err)
}

fn outcome_dict<'py>(py: Python<'py>, label: &str) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("outcome", label)?;
    Ok(d)
}

#[pyfunction]
fn manager_equilibrium<'py>(
    py: Python<'py>,
    params: &PyModelParams,
) -> PyResult<Bound<'py, PyDict>> {
    let outcome = solvers::manager_equilibrium(&params.inner);
    let d = outcome_dict(py, outcome.label())?;
    match outcome {
        ManagerOutcome::ZeroTeam => {
            d.set_item("z_star", 0.0)?;
            d.set_item("v_worker", 0.0)?;
            d.set_item("v_manager", 0.0)?;
        }
        ManagerOutcome::Interior(m) => {
            d.set_item("z_star", m.z_star)?;
            d.set_item("v_worker", m.v_worker)?;
            d.set_item("v_manager", m.v_manager)?;
            d.set_item(
                "verified",
                solvers::verify_manager_global_max(&params.inner, m.z_star).verified,
            )?;
        }
        ManagerOutcome::NoEquilibrium => {}
    }
    Ok(d)
}

#[pyfunction]
fn central_planner_optimum<'py>(
    py: Python<'py>,
    params: &PyModelParams,
) -> PyResult<Bound<'py, PyDict>> {
    let outcome = solvers::central_planner_optimum(&params.inner);
    let d = outcome_dict(py, outcome.label())?;
    match outcome {
        PlannerOutcome::NoOptimum(limit) => d.set_item("limit", format!("{limit:?}"))?,
        PlannerOutcome::UniqueZero => {
            d.set_item("z_star", 0.0)?;
            d.set_item("v_central", 0.0)?;
        }
        PlannerOutcome::UniquePositive {
            z_star, v_central, ..
        }
        | PlannerOutcome::ZeroAndPositive { z_star, v_central } => {
            d.set_item("z_star", z_star)?;
            d.set_item("v_central", v_central)?;
            d.set_item(
                "verified",
                solvers::verify_planner_global_max(&params.inner, z_star).verified,
            )?;
        }
        PlannerOutcome::AnyNonnegative | PlannerOutcome::AnyPositive => {
            d.set_item("v_central", 0.0)?
        }
        PlannerOutcome::Unclassified(diag) => d.set_item("reason", diag.reason)?,
    }
    Ok(d)
}

#[pyfunction]
fn partnership_equilibrium<'py>(
    py: Python<'py>,
    params: &PyModelParams,
) -> PyResult<Bound<'py, PyDict>> {
    let outcome = solvers::partnership_equilibrium(&params.inner);
    let d = outcome_dict(py, outcome.label())?;
    match outcome {
        PartnershipOutcome::ZeroEquilibrium => {
            d.set_item("z_star", 0.0)?;
            d.set_item("v_partner", 0.0)?;
        }
        PartnershipOutcome::UniquePositive {
            z_star, v_partner, ..
        } => {
            d.set_item("z_star", z_star)?;
            d.set_item("v_partner", v_partner)?;
            d.set_item(
                "verified",
                solvers::verify_partnership_global_max(&params.inner, z_star).verified,
            )?;
        }
        PartnershipOutcome::Unclassified(diag) => d.set_item("reason", diag.reason)?,
    }
    Ok(d)
}

/// Sweep CSV text over `theta` or `beta`.
#[pyfunction]
#[pyo3(signature = (params, variable, start, stop, steps))]
fn sweep_csv(
    params: &PyModelParams,
    variable: &str,
    start: f64,
    stop: f64,
    steps: usize,
) -> PyResult<String> {
    let variable: SweepVariable = variable.parse().map_err(py_err)?;
    let grid = midpoint_grid(start, stop, steps).map_err(py_err)?;
    let table = SweepTable::compute(&params.inner, variable, &grid).map_err(py_err)?;
    Ok(table.to_csv_string())
}

/// Simulate `teams` teams of size `z` playing the equilibrium effort.
#[pyfunction]
#[pyo3(signature = (params, z, teams, seed=0))]
fn simulate<'py>(
    py: Python<'py>,
    params: &PyModelParams,
    z: f64,
    teams: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let size = TeamSize::new(z).map_err(py_err)?;
    let lam = model::equilibrium_intensity(&params.inner, size, params.inner.effort_cost)
        .map_err(py_err)?;
    let report = run_simulation(&SimulationConfig::new(teams, seed, params.inner, z, lam))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("ks_distance_vs_rho", report.ks_distance_vs_rho)?;
    d.set_item("mean_team_reward", report.mean_team_reward.mean)?;
    d.set_item("mean_team_reward_stderr", report.mean_team_reward.stderr)?;
    d.set_item("mean_member_payoff", report.mean_member_payoff.mean)?;
    d.set_item(
        "mean_member_payoff_stderr",
        report.mean_member_payoff.stderr,
    )?;
    Ok(d)
}

#[pymodule]
fn mft(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_function(wrap_pyfunction!(reward, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(symmetric_member_value, m)?)?;
    m.add_function(wrap_pyfunction!(member_value, m)?)?;
    m.add_function(wrap_pyfunction!(manager_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(central_planner_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(partnership_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_csv, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
