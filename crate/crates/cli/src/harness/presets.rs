//! Bundled scenario and the five-scenario reproduction set.

use super::sweep::{run_sweep, Axis, Column, ResultRow, SweepSpec};
use super::{HarnessError, ParamPath, ScenarioConfig};

/// Base case: N = 1000, r = 0.2, SoC uniform on [0.1, 0.9], C = 100 JPY,
/// VoT = 50 JPY/min, VoE = 100.
pub const TABLE1_CFG: &str = include_str!("../../scenarios/table1.cfg");

pub fn table1_config() -> ScenarioConfig {
    ScenarioConfig::from_toml_str(TABLE1_CFG, "table1.cfg").expect("bundled config parses")
}

/// The base case plus price and VoE variations: scenarios 1-3 vary the
/// toll (100, 50, 150) at VoE 100, scenarios 4-5 vary VoE (50, 150) at a
/// toll of 100.
pub fn table2_rows() -> Result<Vec<ResultRow>, HarnessError> {
    let base = table1_config();
    let by_price = SweepSpec::new(
        base.clone(),
        vec![
            Axis::new(ParamPath::TollPrice, vec![100.0, 50.0, 150.0]),
            Axis::new(ParamPath::PrefsVoe, vec![100.0]),
        ],
        Column::ALL.to_vec(),
    )?;
    let by_voe = SweepSpec::new(
        base,
        vec![
            Axis::new(ParamPath::TollPrice, vec![100.0]),
            Axis::new(ParamPath::PrefsVoe, vec![50.0, 150.0]),
        ],
        Column::ALL.to_vec(),
    )?;
    let mut rows = run_sweep(&by_price);
    let offset = rows.len();
    rows.extend(
        run_sweep(&by_voe)
            .into_iter()
            .enumerate()
            .map(|(k, mut row)| {
                row.scenario = (offset + k + 1).to_string();
                row
            }),
    );
    Ok(rows)
}
