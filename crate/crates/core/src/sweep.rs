//! Parameter sweeps over `θ` or `β` comparing the three organisational
//! regimes, and their CSV form.
//!
//! Cells that have no number carry an explicit token: `NOEQ` when the manager
//! game has no equilibrium, `NOOPT` when the planner objective has no
//! maximiser, `NA` when the quantity is undefined for that outcome.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::params::ModelParams;
use crate::roots::bisect_newton;
use crate::solvers::{
    central_planner_optimum, manager_equilibrium, partnership_equilibrium, ManagerOutcome,
    PartnershipOutcome, PlannerOutcome,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Theta,
    Beta,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Theta => "theta",
            SweepVariable::Beta => "beta",
        }
    }

    /// Admissible interval; `θ ∈ (0,1)`, `β ∈ [0,1)`.
    pub fn domain(self) -> (f64, f64) {
        (0.0, 1.0)
    }

    pub fn apply(self, params: &ModelParams, value: f64) -> ModelParams {
        let mut out = *params;
        match self {
            SweepVariable::Theta => out.manager_share = value,
            SweepVariable::Beta => out.salary_share = value,
        }
        out
    }
}

impl FromStr for SweepVariable {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(SweepVariable::Theta),
            "beta" => Ok(SweepVariable::Beta),
            other => Err(ModelError::Domain(format!(
                "unknown sweep variable '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Example1,
    Example2,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1 => "example1",
            Preset::Example2 => "example2",
        }
    }

    pub fn params(self) -> ModelParams {
        match self {
            Preset::Example1 => ModelParams::example1(),
            Preset::Example2 => ModelParams::example2(),
        }
    }

    pub fn variable(self) -> SweepVariable {
        match self {
            Preset::Example1 => SweepVariable::Theta,
            Preset::Example2 => SweepVariable::Beta,
        }
    }

    /// Default sweep range.
    pub fn range(self) -> (f64, f64) {
        match self {
            Preset::Example1 => (0.0, 1.0),
            Preset::Example2 => (0.0, 0.8),
        }
    }
}

impl FromStr for Preset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(Preset::Example1),
            "example2" => Ok(Preset::Example2),
            other => Err(ModelError::Domain(format!("unknown preset '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    Na,
    NoEq,
    NoOpt,
}

impl Cell {
    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Value(v) => write!(f, "{v:.16e}"),
            Cell::Na => f.write_str("NA"),
            Cell::NoEq => f.write_str("NOEQ"),
            Cell::NoOpt => f.write_str("NOOPT"),
        }
    }
}

impl FromStr for Cell {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NA" => Ok(Cell::Na),
            "NOEQ" => Ok(Cell::NoEq),
            "NOOPT" => Ok(Cell::NoOpt),
            _ => s
                .parse::<f64>()
                .map(Cell::Value)
                .map_err(|_| ModelError::Domain(format!("bad cell '{s}'"))),
        }
    }
}

/// Outcome of the three regimes at one grid value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub manager_outcome: String,
    pub z_manager: Cell,
    pub v_worker: Cell,
    pub v_manager: Cell,
    pub planner_outcome: String,
    pub z_central: Cell,
    pub v_central: Cell,
    pub partnership_outcome: String,
    pub z_partner: Cell,
    pub v_partner: Cell,
}

/// Named numeric columns of a [`SweepRow`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    ZManager,
    VWorker,
    VManager,
    ZCentral,
    VCentral,
    ZPartner,
    VPartner,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::ZManager => "z_manager",
            Column::VWorker => "v_worker",
            Column::VManager => "v_manager",
            Column::ZCentral => "z_central",
            Column::VCentral => "v_central",
            Column::ZPartner => "z_partner",
            Column::VPartner => "v_partner",
        }
    }
}

impl SweepRow {
    pub fn evaluate(params: &ModelParams, variable: SweepVariable, value: f64) -> Result<SweepRow> {
        let params = variable.apply(params, value);
        params.validate()?;

        let manager = manager_equilibrium(&params);
        let (z_manager, v_worker, v_manager) = match &manager {
            ManagerOutcome::ZeroTeam => (Cell::Value(0.0), Cell::Value(0.0), Cell::Value(0.0)),
            ManagerOutcome::Interior(m) => (
                Cell::Value(m.z_star),
                Cell::Value(m.v_worker),
                Cell::Value(m.v_manager),
            ),
            ManagerOutcome::NoEquilibrium => (Cell::NoEq, Cell::NoEq, Cell::NoEq),
        };

        let planner = central_planner_optimum(&params);
        let (z_central, v_central) = match &planner {
            PlannerOutcome::NoOptimum(_) => (Cell::NoOpt, Cell::NoOpt),
            PlannerOutcome::UniqueZero => (Cell::Value(0.0), Cell::Value(0.0)),
            PlannerOutcome::UniquePositive {
                z_star, v_central, ..
            }
            | PlannerOutcome::ZeroAndPositive { z_star, v_central } => {
                (Cell::Value(*z_star), Cell::Value(*v_central))
            }
            PlannerOutcome::AnyNonnegative | PlannerOutcome::AnyPositive => {
                (Cell::Na, Cell::Value(0.0))
            }
            PlannerOutcome::Unclassified(_) => (Cell::Na, Cell::Na),
        };

        let partnership = partnership_equilibrium(&params);
        let (z_partner, v_partner) = match &partnership {
            PartnershipOutcome::ZeroEquilibrium => (Cell::Value(0.0), Cell::Value(0.0)),
            PartnershipOutcome::UniquePositive {
                z_star, v_partner, ..
            } => (Cell::Value(*z_star), Cell::Value(*v_partner)),
            PartnershipOutcome::Unclassified(_) => (Cell::Na, Cell::Na),
        };

        Ok(SweepRow {
            value,
            manager_outcome: manager.label().to_string(),
            z_manager,
            v_worker,
            v_manager,
            planner_outcome: planner.label().to_string(),
            z_central,
            v_central,
            partnership_outcome: partnership.label().to_string(),
            z_partner,
            v_partner,
        })
    }

    pub fn get(&self, column: Column) -> Cell {
        match column {
            Column::ZManager => self.z_manager,
            Column::VWorker => self.v_worker,
            Column::VManager => self.v_manager,
            Column::ZCentral => self.z_central,
            Column::VCentral => self.v_central,
            Column::ZPartner => self.z_partner,
            Column::VPartner => self.v_partner,
        }
    }

    fn record(&self) -> Vec<String> {
        vec![
            format!("{:.16e}", self.value),
            self.manager_outcome.clone(),
            self.z_manager.to_string(),
            self.v_worker.to_string(),
            self.v_manager.to_string(),
            self.planner_outcome.clone(),
            self.z_central.to_string(),
            self.v_central.to_string(),
            self.partnership_outcome.clone(),
            self.z_partner.to_string(),
            self.v_partner.to_string(),
        ]
    }
}

const TRAILING_COLUMNS: [&str; 10] = [
    "manager_outcome",
    "z_manager",
    "v_worker",
    "v_manager",
    "planner_outcome",
    "z_central",
    "v_central",
    "partnership_outcome",
    "z_partner",
    "v_partner",
];

/// Midpoint grid: `steps` cells of width `h` on `[from, to]`, sampled at
/// `from + (i + 1/2) h`, so open endpoints are never hit.
pub fn midpoint_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(ModelError::Domain("steps must be >= 1".into()));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(ModelError::Domain(format!("bad range [{from}, {to}]")));
    }
    let h = (to - from) / steps as f64;
    Ok((0..steps).map(|i| from + (i as f64 + 0.5) * h).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Evaluate every grid value. Rows come back in grid order whatever the
    /// scheduling.
    pub fn compute(
        params: &ModelParams,
        variable: SweepVariable,
        grid: &[f64],
    ) -> Result<SweepTable> {
        let (lo, hi) = variable.domain();
        if let Some(bad) = grid
            .iter()
            .find(|&&x| !(x >= lo && x < hi) || (variable == SweepVariable::Theta && x <= 0.0))
        {
            return Err(ModelError::InvalidParameter {
                name: variable.name(),
                value: *bad,
                bound: if variable == SweepVariable::Theta {
                    "in (0,1)"
                } else {
                    "in [0,1)"
                },
            });
        }
        let mut rows = grid
            .par_iter()
            .map(|&x| SweepRow::evaluate(params, variable, x))
            .collect::<Result<Vec<_>>>()?;
        rows.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(SweepTable { variable, rows })
    }

    pub fn column(&self, column: Column) -> Vec<(f64, Cell)> {
        self.rows.iter().map(|r| (r.value, r.get(column))).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header = vec![self.variable.name()];
        header.extend(TRAILING_COLUMNS);
        w.write_record(&header).map_err(io_error)?;
        for row in &self.rows {
            w.write_record(row.record()).map_err(io_error)?;
        }
        w.flush().map_err(|e| ModelError::Domain(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<SweepTable> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(io_error)?.clone();
        let variable: SweepVariable = header
            .get(0)
            .ok_or_else(|| ModelError::Domain("empty header".into()))?
            .parse()?;
        if header.iter().skip(1).ne(TRAILING_COLUMNS.iter().copied()) {
            return Err(ModelError::Domain("unexpected sweep columns".into()));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io_error)?;
            let cell = |i: usize| -> Result<Cell> { rec[i].parse() };
            let value = cell(0)?
                .value()
                .ok_or_else(|| ModelError::Domain("grid value must be numeric".into()))?;
            rows.push(SweepRow {
                value,
                manager_outcome: rec[1].to_string(),
                z_manager: cell(2)?,
                v_worker: cell(3)?,
                v_manager: cell(4)?,
                planner_outcome: rec[5].to_string(),
                z_central: cell(6)?,
                v_central: cell(7)?,
                partnership_outcome: rec[8].to_string(),
                z_partner: cell(9)?,
                v_partner: cell(10)?,
            });
        }
        Ok(SweepTable { variable, rows })
    }
}

fn io_error(e: csv::Error) -> ModelError {
    ModelError::Domain(format!("csv: {e}"))
}

/// Difference `a - b` of two columns at one grid value, `None` when either
/// cell is a sentinel.
pub fn column_gap(
    params: &ModelParams,
    variable: SweepVariable,
    value: f64,
    a: Column,
    b: Column,
) -> Option<f64> {
    let row = SweepRow::evaluate(params, variable, value).ok()?;
    Some(row.get(a).value()? - row.get(b).value()?)
}

/// Every crossing of columns `a` and `b`: sign changes between adjacent
/// numeric rows of `table`, refined by bisection on the solvers.
pub fn crossings(params: &ModelParams, table: &SweepTable, a: Column, b: Column) -> Vec<f64> {
    let gaps: Vec<(f64, Option<f64>)> = table
        .rows
        .iter()
        .map(|r| {
            (
                r.value,
                r.get(a).value().zip(r.get(b).value()).map(|(x, y)| x - y),
            )
        })
        .collect();
    let mut out = Vec::new();
    for pair in gaps.windows(2) {
        let ((x0, Some(g0)), (x1, Some(g1))) = (pair[0], pair[1]) else {
            continue;
        };
        if g0 == 0.0 {
            out.push(x0);
            continue;
        }
        if g0.signum() == g1.signum() || g1 == 0.0 {
            continue;
        }
        let f = |x: f64| column_gap(params, table.variable, x, a, b).unwrap_or(f64::NAN);
        if let Ok(root) = bisect_newton(f, None::<fn(f64) -> f64>, x0, x1) {
            out.push(root);
        }
    }
    if let Some((x, Some(g))) = gaps.last() {
        if *g == 0.0 {
            out.push(*x);
        }
    }
    out
}

/// Data behind one of the four comparison figures.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub file_stem: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(Column, String)>,
    pub table: SweepTable,
}

impl FigureData {
    /// Long-form series: `(x, y)` with `None` where the cell is a sentinel.
    pub fn points(&self, column: Column) -> Vec<(f64, Option<f64>)> {
        self.table
            .rows
            .iter()
            .map(|r| (r.value, r.get(column).value()))
            .collect()
    }

    pub fn chart(&self) -> crate::svg::LineChart {
        crate::svg::LineChart {
            title: self.title.clone(),
            x_label: self.x_label.clone(),
            y_label: self.y_label.clone(),
            series: self
                .series
                .iter()
                .map(|(c, label)| crate::svg::Series {
                    label: label.clone(),
                    points: self.points(*c),
                })
                .collect(),
        }
    }

    /// CSV with the grid variable and one column per series, sentinels kept.
    pub fn to_csv_string(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec![self.table.variable.name().to_string()];
        header.extend(self.series.iter().map(|(c, _)| c.name().to_string()));
        w.write_record(&header).expect("writing to memory");
        for row in &self.table.rows {
            let mut rec = vec![format!("{:.16e}", row.value)];
            rec.extend(self.series.iter().map(|(c, _)| row.get(*c).to_string()));
            w.write_record(&rec).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8")
    }
}

/// Grid size used for the figures.
pub const FIGURE_STEPS: usize = 400;

/// The four figures: values then sizes against `θ` for example 1, and the
/// same against `β` for example 2.
pub fn figure_data(steps: usize) -> Result<Vec<FigureData>> {
    let mut out = Vec::new();
    for (preset, first) in [(Preset::Example1, 1), (Preset::Example2, 3)] {
        let (from, to) = preset.range();
        let grid = midpoint_grid(from, to, steps)?;
        let table = SweepTable::compute(&preset.params(), preset.variable(), &grid)?;
        let var = preset.variable().name();
        out.push(FigureData {
            file_stem: format!("figure{first}"),
            title: format!("Member values against {var} ({})", preset.name()),
            x_label: var.to_string(),
            y_label: "value".into(),
            series: vec![
                (Column::VWorker, "V worker".into()),
                (Column::VCentral, "V central".into()),
                (Column::VPartner, "V partner".into()),
            ],
            table: table.clone(),
        });
        out.push(FigureData {
            file_stem: format!("figure{}", first + 1),
            title: format!("Team sizes against {var} ({})", preset.name()),
            x_label: var.to_string(),
            y_label: "team size".into(),
            series: vec![
                (Column::ZManager, "z manager".into()),
                (Column::ZCentral, "z central".into()),
                (Column::ZPartner, "z partner".into()),
            ],
            table,
        });
    }
    Ok(out)
}
