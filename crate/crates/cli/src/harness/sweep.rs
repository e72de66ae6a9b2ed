//! Parameter sweeps over a base scenario.

use std::fmt;
use std::str::FromStr;

use ers_core::analysis::{classify, metrics, PatternLabel};
use ers_core::equilibrium::{solve, threshold_soc};
use ers_core::model::Preferences;
use rayon::prelude::*;
use serde::Deserialize;

use super::config::{ParamPath, ScenarioConfig};
use super::output::{Cell, Table};
use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub path: ParamPath,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(path: ParamPath, values: Vec<f64>) -> Self {
        Axis { path, values }
    }
}

/// Result columns, in their fixed output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Column {
    Scenario,
    DwptRatio,
    Vot,
    Voe,
    TollPrice,
    SThres,
    X1D,
    X2D,
    X1O,
    X2O,
    X1,
    T1,
    Ttt,
    Tcv,
    Revenue,
    Pattern,
    ConventionalSo,
    ErsOptimum,
    Error,
}

impl Column {
    pub const ALL: [Column; 19] = [
        Column::Scenario,
        Column::DwptRatio,
        Column::Vot,
        Column::Voe,
        Column::TollPrice,
        Column::SThres,
        Column::X1D,
        Column::X2D,
        Column::X1O,
        Column::X2O,
        Column::X1,
        Column::T1,
        Column::Ttt,
        Column::Tcv,
        Column::Revenue,
        Column::Pattern,
        Column::ConventionalSo,
        Column::ErsOptimum,
        Column::Error,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::Scenario => "scenario",
            Column::DwptRatio => "dwpt_ratio",
            Column::Vot => "vot",
            Column::Voe => "voe",
            Column::TollPrice => "toll_price",
            Column::SThres => "s_thres",
            Column::X1D => "x1_d",
            Column::X2D => "x2_d",
            Column::X1O => "x1_o",
            Column::X2O => "x2_o",
            Column::X1 => "x1",
            Column::T1 => "t1",
            Column::Ttt => "ttt",
            Column::Tcv => "tcv",
            Column::Revenue => "revenue",
            Column::Pattern => "pattern",
            Column::ConventionalSo => "conventional_so",
            Column::ErsOptimum => "ers_optimum",
            Column::Error => "error",
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Column::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| HarnessError::Validation {
                field: "outputs".into(),
                reason: format!("unknown column {s:?}"),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub axes: Vec<Axis>,
    /// Requested columns; always emitted in [`Column::ALL`] order.
    pub outputs: Vec<Column>,
}

impl SweepSpec {
    pub fn new(
        base: ScenarioConfig,
        axes: Vec<Axis>,
        mut outputs: Vec<Column>,
    ) -> Result<Self, HarnessError> {
        if axes.is_empty() {
            return Err(HarnessError::Validation {
                field: "axes".into(),
                reason: "at least one axis is required".into(),
            });
        }
        for axis in &axes {
            if axis.values.is_empty() {
                return Err(HarnessError::Validation {
                    field: axis.path.to_string(),
                    reason: "axis has no values".into(),
                });
            }
            if base.get(axis.path).is_none() {
                return Err(HarnessError::Validation {
                    field: axis.path.to_string(),
                    reason: "does not apply to the base scenario".into(),
                });
            }
        }
        if outputs.is_empty() {
            outputs = Column::ALL.to_vec();
        }
        outputs.sort();
        outputs.dedup();
        Ok(SweepSpec {
            base,
            axes,
            outputs,
        })
    }

    /// Parses a sweep file: a `[base]` scenario table, `[[axes]]` entries
    /// with `path` and `values`, and an optional `outputs` column list.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, HarnessError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct AxisFile {
            path: String,
            values: Vec<f64>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct SweepFile {
            #[serde(default)]
            outputs: Vec<String>,
            base: ScenarioConfig,
            axes: Vec<AxisFile>,
        }
        let file: SweepFile = toml::from_str(text).map_err(|e| HarnessError::Parse {
            origin: origin.to_owned(),
            message: e.to_string(),
        })?;
        let axes = file
            .axes
            .into_iter()
            .map(|a| Ok(Axis::new(a.path.parse()?, a.values)))
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let outputs = file
            .outputs
            .iter()
            .map(|c| c.parse())
            .collect::<Result<Vec<Column>, _>>()?;
        SweepSpec::new(file.base, axes, outputs)
    }

    /// Scenario configs of every cell, first axis varying slowest.
    pub fn cells(&self) -> Vec<Vec<(ParamPath, f64)>> {
        let mut cells: Vec<Vec<(ParamPath, f64)>> = vec![Vec::new()];
        for axis in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut cell = prefix.clone();
                        cell.push((axis.path, v));
                        cell
                    })
                })
                .collect();
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowValues {
    pub s_thres: f64,
    pub x1_d: f64,
    pub x2_d: f64,
    pub x1_o: f64,
    pub x2_o: f64,
    pub x1: f64,
    pub t1: f64,
    pub ttt: f64,
    pub tcv: f64,
    pub revenue: f64,
    pub pattern: PatternLabel,
    pub conventional_so: bool,
    pub ers_optimum: bool,
}

/// One evaluated cell. Failed cells keep their identifiers and carry the
/// error message instead of values.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub dwpt_ratio: f64,
    pub vot: f64,
    pub voe: f64,
    pub toll_price: f64,
    pub outcome: Result<RowValues, String>,
}

impl ResultRow {
    pub fn values(&self) -> Option<&RowValues> {
        self.outcome.as_ref().ok()
    }

    pub fn cell(&self, column: Column) -> Cell {
        let v = self.outcome.as_ref().ok();
        let num = |f: fn(&RowValues) -> f64| v.map_or(Cell::Empty, |v| Cell::Float(f(v)));
        match column {
            Column::Scenario => Cell::Text(self.scenario.clone()),
            Column::DwptRatio => Cell::Float(self.dwpt_ratio),
            Column::Vot => Cell::Float(self.vot),
            Column::Voe => Cell::Float(self.voe),
            Column::TollPrice => Cell::Float(self.toll_price),
            Column::SThres => num(|v| v.s_thres),
            Column::X1D => num(|v| v.x1_d),
            Column::X2D => num(|v| v.x2_d),
            Column::X1O => num(|v| v.x1_o),
            Column::X2O => num(|v| v.x2_o),
            Column::X1 => num(|v| v.x1),
            Column::T1 => num(|v| v.t1),
            Column::Ttt => num(|v| v.ttt),
            Column::Tcv => num(|v| v.tcv),
            Column::Revenue => num(|v| v.revenue),
            Column::Pattern => v.map_or(Cell::Empty, |v| Cell::Text(v.pattern.to_string())),
            Column::ConventionalSo => v.map_or(Cell::Empty, |v| Cell::Bool(v.conventional_so)),
            Column::ErsOptimum => v.map_or(Cell::Empty, |v| Cell::Bool(v.ers_optimum)),
            Column::Error => match &self.outcome {
                Ok(_) => Cell::Empty,
                Err(msg) => Cell::Text(msg.clone()),
            },
        }
    }
}

/// Rows as a table restricted to `columns` (kept in canonical order).
pub fn rows_table(rows: &[ResultRow], columns: &[Column]) -> Table {
    let mut columns = columns.to_vec();
    columns.sort();
    columns.dedup();
    Table {
        columns: columns.iter().map(|c| c.name().to_owned()).collect(),
        rows: rows
            .iter()
            .map(|r| columns.iter().map(|&c| r.cell(c)).collect())
            .collect(),
    }
}

fn evaluate(config: &ScenarioConfig) -> Result<RowValues, HarnessError> {
    let scenario = config.to_scenario()?;
    let (eq, _) = solve(&scenario)?;
    let pattern = classify(&scenario, &eq)?;
    let m = metrics(&scenario, &eq)?;
    Ok(RowValues {
        s_thres: eq.s_thres,
        x1_d: eq.x1_d,
        x2_d: eq.x2_d,
        x1_o: eq.x1_o,
        x2_o: eq.x2_o,
        x1: eq.x1(),
        t1: eq.t1,
        ttt: m.ttt,
        tcv: m.tcv,
        revenue: m.revenue,
        pattern,
        conventional_so: m.conventional_so,
        ers_optimum: m.ers_optimum,
    })
}

/// Solves one config into a row labelled `id`.
pub fn evaluate_config(id: String, config: &ScenarioConfig) -> ResultRow {
    let get = |p| config.get(p).unwrap_or(f64::NAN);
    ResultRow {
        scenario: id,
        dwpt_ratio: get(ParamPath::DwptRatio),
        vot: get(ParamPath::PrefsVot),
        voe: get(ParamPath::PrefsVoe),
        toll_price: get(ParamPath::TollPrice),
        outcome: evaluate(config).map_err(|e| e.to_string()),
    }
}

/// Evaluates every cell of the Cartesian product of the axes. Cells run in
/// parallel; rows come back in axis order, labelled 1, 2, ...
pub fn run_sweep(spec: &SweepSpec) -> Vec<ResultRow> {
    spec.cells()
        .into_par_iter()
        .enumerate()
        .map(|(k, cell)| {
            let mut config = spec.base.clone();
            let applied = cell
                .iter()
                .try_for_each(|&(path, value)| config.set(path, value));
            let mut row = evaluate_config((k + 1).to_string(), &config);
            if let Err(e) = applied {
                row.outcome = Err(e.to_string());
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Point {
    pub voe: f64,
    pub toll_price: f64,
    pub s_thres: f64,
}

/// Threshold SoC on a VoE x price grid with equal link times (the regime
/// every minority-DWPT equilibrium is in). VoE varies slowest.
pub fn fig2_data(vot: f64, prices: &[f64], voes: &[f64]) -> Result<Vec<Fig2Point>, HarnessError> {
    if prices.is_empty() || voes.is_empty() {
        return Err(HarnessError::Validation {
            field: if prices.is_empty() {
                "toll range"
            } else {
                "voe range"
            }
            .into(),
            reason: "must not be empty".into(),
        });
    }
    let mut points = Vec::with_capacity(prices.len() * voes.len());
    for &voe in voes {
        let prefs = Preferences::new(vot, voe).map_err(|e| HarnessError::Validation {
            field: "prefs".into(),
            reason: e.to_string(),
        })?;
        for &price in prices {
            if !(price >= 0.0) {
                return Err(HarnessError::Validation {
                    field: "toll range".into(),
                    reason: format!("negative price {price}"),
                });
            }
            points.push(Fig2Point {
                voe,
                toll_price: price,
                s_thres: threshold_soc(&prefs, price, 0.0, 0.0),
            });
        }
    }
    Ok(points)
}

pub fn fig2_table(points: &[Fig2Point]) -> Table {
    Table {
        columns: vec!["voe".into(), "toll_price".into(), "s_thres".into()],
        rows: points
            .iter()
            .map(|p| {
                vec![
                    Cell::Float(p.voe),
                    Cell::Float(p.toll_price),
                    Cell::Float(p.s_thres),
                ]
            })
            .collect(),
    }
}
