//! The `ers` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ers_core::analysis::{classify, metrics, toll_bands};
use ers_core::dynamics::{InitialAssignment, OrderPolicy, Simulator};
use ers_core::equilibrium::{solve, RegimeTag};
use ers_core::model::{Link, Scenario};

use crate::harness::sweep::{fig2_table, rows_table};
use crate::harness::{
    bands_table, fig2_data, load_config, parse_override, run_sweep, table1_config, table2_rows,
    trajectory_table, Axis, Column, Format, HarnessError, ParamPath, ScenarioConfig, SweepSpec,
    Table,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ers",
    version,
    about = "Route choice on a two-link network with a dynamic wireless charging lane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one scenario and report the equilibrium.
    Solve(ScenarioArgs),
    /// Solve every cell of a parameter grid.
    Sweep(SweepArgs),
    /// Toll ranges producing each flow pattern.
    Bands(ScenarioArgs),
    /// Agent-based best-response dynamics.
    Simulate(SimulateArgs),
    /// The five-scenario reproduction table.
    Table2(OutputArgs),
    /// Threshold SoC over a VoE x toll grid.
    Fig2(Fig2Args),
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write machine-readable output here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file (TOML); the bundled base case if omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override a parameter, e.g. `--set toll.price=150`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep file with `[base]`, `[[axes]]` and `outputs`.
    #[arg(long, conflicts_with_all = ["axis", "scenario", "set"])]
    spec: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,
    /// Grid axis, e.g. `--axis toll.price=0,50,100`.
    #[arg(long, value_name = "PATH=V1,V2,...")]
    axis: Vec<String>,
    /// Comma-separated result columns (default: all).
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Number of DWPT-EV agents when the SoC distribution is continuous.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Link2)]
    init: InitArg,
    #[arg(long, value_enum, default_value_t = OrderArg::Random)]
    order: OrderArg,
    #[arg(long, default_value_t = 10_000)]
    max_rounds: usize,
}

#[derive(Debug, Args)]
struct Fig2Args {
    #[arg(long, default_value_t = 50.0)]
    vot: f64,
    /// Toll grid as `start:stop:count`.
    #[arg(long, default_value = "0:300:31")]
    toll: String,
    /// VoE grid as `start:stop:count`.
    #[arg(long, default_value = "50:150:3")]
    voe: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    Link1,
    Link2,
    Random,
    /// Half of each class on each link.
    Mixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Sequential,
    Random,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    match command {
        Command::Solve(args) => cmd_solve(args, stdout),
        Command::Sweep(args) => cmd_sweep(args, stdout),
        Command::Bands(args) => cmd_bands(args, stdout),
        Command::Simulate(args) => cmd_simulate(args, stdout),
        Command::Table2(out) => {
            let rows = table2_rows()?;
            emit(&rows_table(&rows, &Column::ALL), &out, stdout)
        }
        Command::Fig2(args) => {
            let prices = parse_range("toll", &args.toll)?;
            let voes = parse_range("voe", &args.voe)?;
            let points = fig2_data(args.vot, &prices, &voes)?;
            emit(&fig2_table(&points), &args.out, stdout)
        }
    }
}

fn stdout_err(e: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

/// Writes `table` to `--output` when given, otherwise to stdout.
fn emit(table: &Table, out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    match &out.output {
        Some(path) => write_file(table, out.format.into(), path),
        None => table.write(out.format.into(), stdout),
    }
}

fn write_file(table: &Table, format: Format, path: &Path) -> Result<(), HarnessError> {
    let io = |e| HarnessError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    table.write(format, &mut w)?;
    w.flush().map_err(io)
}

fn scenario_config(path: Option<&Path>, set: &[String]) -> Result<ScenarioConfig, HarnessError> {
    let mut config = match path {
        Some(p) => load_config(p)?,
        None => table1_config(),
    };
    for arg in set {
        let (path, value) = parse_override(arg)?;
        config.set(path, value)?;
    }
    Ok(config)
}

fn cmd_solve(args: ScenarioArgs, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    let config = scenario_config(args.scenario.as_deref(), &args.set)?;
    let scenario = config.to_scenario()?;
    let (eq, regime) = solve(&scenario)?;
    let pattern = classify(&scenario, &eq)?;
    let m = metrics(&scenario, &eq)?;
    let regime = match regime {
        RegimeTag::Interior => "interior",
        RegimeTag::CornerOtherOn2 => "other vehicles all on link 2",
        RegimeTag::CornerOtherOn1 => "other vehicles all on link 1",
    };
    let lines = [
        format!("pattern          {pattern}"),
        format!("regime           {regime}"),
        format!("threshold SoC    {:.4}", eq.s_thres),
        format!(
            "link 1 flow      {:.4} (DWPT {:.4}, other {:.4})",
            eq.x1(),
            eq.x1_d,
            eq.x1_o
        ),
        format!(
            "link 2 flow      {:.4} (DWPT {:.4}, other {:.4})",
            eq.x2(),
            eq.x2_d,
            eq.x2_o
        ),
        format!("travel times     t1 {:.4} min, t2 {:.4} min", eq.t1, eq.t2),
        format!("charging users   {:.4}", eq.n_thres),
        format!("total time       {:.4} veh-min", m.ttt),
        format!("energy supplied  {:.4} kWh", m.tcv),
        format!("toll revenue     {:.4} JPY", m.revenue),
        format!("conventional SO  {}", m.conventional_so),
        format!("ERS optimum      {}", m.ers_optimum),
    ];
    for line in lines {
        writeln!(stdout, "{line}").map_err(stdout_err)?;
    }
    if let Some(path) = &args.out.output {
        let row = crate::harness::sweep::evaluate_config("1".into(), &config);
        write_file(
            &rows_table(&[row], &Column::ALL),
            args.out.format.into(),
            path,
        )?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            SweepSpec::from_toml_str(&text, &path.display().to_string())?
        }
        None => {
            let base = scenario_config(args.scenario.as_deref(), &args.set)?;
            let axes = args
                .axis
                .iter()
                .map(|a| parse_axis(a))
                .collect::<Result<Vec<_>, _>>()?;
            SweepSpec::new(base, axes, Vec::new())?
        }
    };
    if !args.columns.is_empty() {
        let columns = args
            .columns
            .iter()
            .map(|c| c.trim().parse())
            .collect::<Result<Vec<Column>, _>>()?;
        spec = SweepSpec::new(spec.base, spec.axes, columns)?;
    }
    let rows = run_sweep(&spec);
    emit(&rows_table(&rows, &spec.outputs), &args.out, stdout)
}

fn cmd_bands(args: ScenarioArgs, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    let scenario = scenario_config(args.scenario.as_deref(), &args.set)?.to_scenario()?;
    let bands = toll_bands(&scenario)?;
    emit(&bands_table(&bands), &args.out, stdout)
}

fn simulation_scenario(
    scenario: &Scenario,
    agents: Option<usize>,
) -> Result<Scenario, HarnessError> {
    if scenario.soc().agents().is_some() {
        if agents.is_some_and(|n| n != scenario.soc().agents().map_or(0, <[f64]>::len)) {
            return Err(HarnessError::Validation {
                field: "agents".into(),
                reason: "a discrete population keeps its own size".into(),
            });
        }
        return Ok(scenario.clone());
    }
    let count = agents.unwrap_or_else(|| scenario.dwpt_mass().round() as usize);
    if count == 0 {
        return Err(HarnessError::Validation {
            field: "agents".into(),
            reason: "need at least one DWPT-EV agent".into(),
        });
    }
    Ok(scenario.discretized(count)?)
}

fn cmd_simulate(args: SimulateArgs, stdout: &mut dyn Write) -> Result<(), HarnessError> {
    let base = scenario_config(args.scenario.scenario.as_deref(), &args.scenario.set)?;
    let scenario = simulation_scenario(&base.to_scenario()?, args.agents)?;
    let n_dwpt = scenario.dwpt_mass().round() as usize;
    let n_other = scenario.other_mass().round() as usize;
    let init = match args.init {
        InitArg::Link1 => InitialAssignment::AllOn(Link::Ers),
        InitArg::Link2 => InitialAssignment::AllOn(Link::Plain),
        InitArg::Random => InitialAssignment::Random { seed: args.seed },
        InitArg::Mixed => InitialAssignment::Flows {
            x1_d: n_dwpt / 2,
            x1_o: n_other / 2,
        },
    };
    let policy = match args.order {
        OrderArg::Sequential => OrderPolicy::Sequential,
        OrderArg::Random => OrderPolicy::SeededRandom { seed: args.seed },
    };
    let mut sim = Simulator::for_scenario(&scenario, init, policy)?;
    let trajectory = sim.run(args.max_rounds)?;
    let last = trajectory
        .snapshots
        .last()
        .expect("round 0 is always recorded");
    let lines = [
        format!("agents           {n_dwpt} DWPT-EV, {n_other} other"),
        format!(
            "converged        {} after {} rounds",
            trajectory.converged, trajectory.terminal_round
        ),
        format!("switches         {}", trajectory.total_switches),
        format!("link 1 flow      DWPT {}, other {}", last.x1_d, last.x1_o),
        format!(
            "travel times     t1 {:.4} min, t2 {:.4} min",
            last.t1, last.t2
        ),
        format!("potential        {:.4}", last.potential),
    ];
    for line in lines {
        writeln!(stdout, "{line}").map_err(stdout_err)?;
    }
    if let Some(path) = &args.scenario.out.output {
        write_file(
            &trajectory_table(&trajectory),
            args.scenario.out.format.into(),
            path,
        )?;
    }
    Ok(())
}

fn parse_axis(arg: &str) -> Result<Axis, HarnessError> {
    let (path, values) = arg
        .split_once('=')
        .ok_or_else(|| HarnessError::Validation {
            field: "axis".into(),
            reason: format!("expected PATH=V1,V2,..., got {arg:?}"),
        })?;
    let path: ParamPath = path.trim().parse()?;
    let values = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| HarnessError::Validation {
                    field: path.to_string(),
                    reason: format!("not a number: {v:?}"),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Axis::new(path, values))
}

/// `start:stop:count`, both ends included.
fn parse_range(field: &str, arg: &str) -> Result<Vec<f64>, HarnessError> {
    let invalid = |reason: &str| HarnessError::Validation {
        field: field.into(),
        reason: format!("{reason} in {arg:?}"),
    };
    let parts: Vec<&str> = arg.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(invalid("expected start:stop:count"));
    };
    let start: f64 = start.trim().parse().map_err(|_| invalid("bad start"))?;
    let stop: f64 = stop.trim().parse().map_err(|_| invalid("bad stop"))?;
    let count: usize = count.trim().parse().map_err(|_| invalid("bad count"))?;
    if !(start.is_finite() && stop.is_finite()) || count == 0 {
        return Err(invalid("need finite ends and a positive count"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("ers").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("t", "0:10:3").unwrap(), vec![0.0, 5.0, 10.0]);
        assert_eq!(parse_range("t", "7:9:1").unwrap(), vec![7.0]);
        assert!(parse_range("t", "0:10").is_err());
        assert!(parse_range("t", "0:10:0").is_err());
    }

    #[test]
    fn axes() {
        let axis = parse_axis("prefs.voe=50, 100").unwrap();
        assert_eq!(axis.path, ParamPath::PrefsVoe);
        assert_eq!(axis.values, vec![50.0, 100.0]);
        assert!(parse_axis("prefs.voe").is_err());
        assert!(parse_axis("prefs.voe=x").is_err());
    }

    #[test]
    fn solve_summary() {
        let (code, out, _) = run_args(&["solve"]);
        assert_eq!(code, 0);
        assert!(out.contains("B_i_c"), "{out}");
        assert!(out.contains("threshold SoC    0.5000"), "{out}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
        assert_eq!(run_args(&["nonsense"]).0, EXIT_INVALID);
        let (code, _, err) = run_args(&["solve", "--set", "dwpt_ratio=1.5"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("dwpt_ratio"), "{err}");
        assert_eq!(
            run_args(&["bands", "--set", "toll.price=-1"]).0,
            EXIT_INVALID
        );
    }

    #[test]
    fn bands_to_stdout() {
        let (code, out, _) = run_args(&["bands"]);
        assert_eq!(code, 0);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], "pattern,c_low,c_high");
        assert!(lines[1].starts_with("B_i_a,0.0000,11.11"), "{out}");
    }

    #[test]
    fn simulate_small() {
        let (code, out, err) = run_args(&["simulate", "--agents", "20", "--set", "dwpt_ratio=0.2"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("converged        true"), "{out}");
    }
}
