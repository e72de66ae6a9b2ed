//! Tabular output in CSV and JSON.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use ers_core::analysis::TollBand;
use ers_core::dynamics::Trajectory;
use serde_json::{Map, Number, Value};

use super::HarnessError;

/// Decimal places used for every float in every format.
pub const DECIMALS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    /// The textual form shared by all formats.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) if v.is_nan() => "nan".to_owned(),
            Cell::Float(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.to_owned(),
            Cell::Float(v) => {
                let s = format!("{v:.DECIMALS$}");
                if s.trim_start_matches('-')
                    .bytes()
                    .all(|b| b == b'0' || b == b'.')
                {
                    s.trim_start_matches('-').to_owned()
                } else {
                    s
                }
            }
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => {
                let rendered = self.render();
                rendered
                    .parse::<f64>()
                    .ok()
                    .and_then(Number::from_f64)
                    .map_or(Value::String(rendered), Value::Number)
            }
            Cell::Float(_) => Value::String(self.render()),
            Cell::Int(v) => Value::Number((*v).into()),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(HarnessError::Validation {
                field: "format".into(),
                reason: format!("expected csv or json, got {s:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<(), HarnessError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn to_string(&self, format: Format) -> Result<String, HarnessError> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        String::from_utf8(buf).map_err(|e| HarnessError::Output(e.to_string()))
    }

    /// CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), HarnessError> {
        let err = |e: csv::Error| HarnessError::Output(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(err)?;
        }
        w.flush().map_err(|e| HarnessError::Output(e.to_string()))
    }

    /// A JSON array of objects keyed by column name, in column order.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), HarnessError> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &records)
            .map_err(|e| HarnessError::Output(e.to_string()))?;
        writeln!(out).map_err(|e| HarnessError::Output(e.to_string()))
    }
}

pub fn trajectory_table(trajectory: &Trajectory) -> Table {
    Table {
        columns: ["round", "x1_d", "x1_o", "t1", "t2", "switches", "potential"]
            .map(String::from)
            .to_vec(),
        rows: trajectory
            .snapshots
            .iter()
            .map(|s| {
                vec![
                    Cell::Int(s.round as i64),
                    Cell::Int(s.x1_d as i64),
                    Cell::Int(s.x1_o as i64),
                    Cell::Float(s.t1),
                    Cell::Float(s.t2),
                    Cell::Int(s.switches as i64),
                    Cell::Float(s.potential),
                ]
            })
            .collect(),
    }
}

pub fn bands_table(bands: &[TollBand]) -> Table {
    Table {
        columns: ["pattern", "c_low", "c_high"].map(String::from).to_vec(),
        rows: bands
            .iter()
            .map(|b| {
                vec![
                    Cell::Text(b.pattern.to_string()),
                    Cell::Float(b.c_low),
                    Cell::Float(b.c_high),
                ]
            })
            .collect(),
    }
}
