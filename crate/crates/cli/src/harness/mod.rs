//! Config ingestion, sweeps, presets and result serialization.

pub mod config;
pub mod output;
pub mod presets;
pub mod sweep;

pub use config::{
    load_config, load_scenario, parse_override, serialize_scenario, ParamPath, ScenarioConfig,
};
pub use output::{bands_table, trajectory_table, Cell, Format, Table};
pub use presets::{table1_config, table2_rows, TABLE1_CFG};
pub use sweep::{fig2_data, run_sweep, Axis, Column, Fig2Point, ResultRow, RowValues, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },
    #[error(transparent)]
    Core(#[from] ers_core::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl HarnessError {
    /// Solver and bisection failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, HarnessError::Core(e) if e.is_numerical())
    }
}
