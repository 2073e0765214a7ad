//! Library side of the `zoneshare` command: argument definitions, CSV
//! schemas and the command runners, kept out of `main` so they can be
//! driven in-process by tests.
//!
//! Exit codes: 0 success, 1 usage, 2 validation (bad config, arguments or
//! output path), 3 numeric failure in an engine.

pub mod args;
pub mod output;

use std::fmt;
use std::io::Write;
use std::path::Path;

use zoneshare::analytic::{coverage_curve, ws_adr, CoverageCurve, UserClass};
use zoneshare::model::file::ScenarioFile;
use zoneshare::model::units::{to_linear, DbKind};
use zoneshare::optimizer::{sweep, Engine, SweepGrid, SweepResult};
use zoneshare::simulator::{estimate_adr_report, estimate_coverage_curves, sample_scene, SimulationSettings};
use zoneshare::{Error, Execution, Scenario};

use args::{
    AdrArgs, Command, CoverageArgs, EngineChoice, OperatingPointArgs, OutputArgs, ScenarioArgs, SceneArgs,
    SimArgs, SweepArgs,
};
use output::{
    coverage_rows, write_adr_gnuplot, write_coverage_gnuplot, write_csv, AdrRow, SceneRow,
};

pub use args::Cli;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Output(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Output(m) => write!(f, "output: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_numeric() => 3,
            CliError::Core(_) | CliError::Output(_) => 2,
        }
    }
}

/// Runs one command. Data goes to `--output` when given and to `out`
/// otherwise; summaries and notes go to `log`.
pub fn run(cli: &Cli, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Coverage(a) => run_coverage(a, out),
        Command::Adr(a) => run_adr(a, out, log),
        Command::Sweep(a) => run_sweep(a, out, log, false),
        Command::Optimize(a) => run_sweep(&a.sweep, out, log, true),
        Command::Defaults(a) => emit(a.output.as_deref(), out, ScenarioFile::reference().to_toml().as_bytes()),
        Command::SimulateScene(a) => run_scene(a, out),
    }
}

fn emit(path: Option<&Path>, out: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => {
            std::fs::write(p, bytes).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))
        }
        _ => out.write_all(bytes).map_err(|e| CliError::Output(e.to_string())),
    }
}

fn log_line(log: &mut dyn Write, line: &str) {
    // A closed stderr must not turn a finished run into a failure.
    let _ = writeln!(log, "{line}");
}

fn load_scenario(s: &ScenarioArgs, point: Option<&OperatingPointArgs>) -> Result<Scenario, CliError> {
    let file = match &s.config {
        Some(path) => ScenarioFile::load(path)?,
        None => ScenarioFile::reference(),
    };
    let sc = file.to_scenario()?;
    let sc = match s.sim_half_width_km {
        Some(w) => sc.modified(|c| c.sim_region_half_width = w * 1e3)?,
        None => sc,
    };
    Ok(match point {
        Some(p) if p.rp_km.is_some() || p.omega.is_some() => sc.with_operating_point(
            p.rp_km.map_or(sc.spectrum.protection_radius, |r| r * 1e3),
            p.omega.unwrap_or(sc.spectrum.shared_fraction),
        )?,
        _ => sc,
    })
}

fn settings(sim: &SimArgs) -> Result<SimulationSettings, CliError> {
    if sim.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    Ok(SimulationSettings {
        trials: sim.trials,
        seed: sim.seed,
        exec: execution(sim),
    })
}

fn execution(sim: &SimArgs) -> Execution {
    if sim.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn single_engine(choice: EngineChoice, sim: &SimArgs, command: &str) -> Result<Engine, CliError> {
    match choice {
        EngineChoice::Analytic => Ok(Engine::Analytic),
        EngineChoice::Simulated => Ok(Engine::Simulated(settings(sim)?)),
        EngineChoice::Both => Err(CliError::Usage(format!(
            "--engine both is only available for `coverage`; run `{command}` once per engine"
        ))),
    }
}

/// "start:stop:step" (inclusive) or a comma-separated list.
pub fn parse_axis(axis: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: String| CliError::Usage(format!("{flag} {axis:?}: {why}"));
    let number = |t: &str| t.trim().parse::<f64>().map_err(|e| bad(format!("{t:?}: {e}")));
    let values = if axis.contains(':') {
        let parts = axis.split(':').map(number).collect::<Result<Vec<_>, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad("expected start:stop:step".into()));
        };
        SweepGrid::range(start, stop, step).map_err(|e| bad(e.to_string()))?
    } else {
        axis.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(number)
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad("no values".into()));
    }
    Ok(values)
}

fn thresholds_db(a: &CoverageArgs) -> Result<Vec<f64>, CliError> {
    match &a.thresholds_db {
        Some(list) => {
            if list.contains(':') {
                return Err(CliError::Usage("--thresholds-db takes a comma-separated list".into()));
            }
            parse_axis(list, "--thresholds-db")
        }
        None => SweepGrid::range(a.start_db, a.stop_db, a.step_db)
            .map_err(|e| CliError::Usage(format!("threshold range: {e}"))),
    }
}

fn run_coverage(a: &CoverageArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let db = thresholds_db(a)?;
    let sc = load_scenario(&a.scenario, Some(&a.point))?;
    let linear = db
        .iter()
        .map(|&x| to_linear(x, DbKind::GainDbi))
        .collect::<Result<Vec<_>, _>>()?;

    let mut curves: Vec<CoverageCurve> = Vec::new();
    if matches!(a.engine, EngineChoice::Analytic | EngineChoice::Both) {
        for class in UserClass::ALL {
            curves.push(coverage_curve(&sc, class, &linear, execution(&a.sim))?);
        }
    }
    if matches!(a.engine, EngineChoice::Simulated | EngineChoice::Both) {
        curves.extend(estimate_coverage_curves(&sc, &UserClass::ALL, &linear, &settings(&a.sim)?)?);
    }

    let rows = coverage_rows(&curves, &db);
    let mut buf = Vec::new();
    if a.output.gnuplot {
        write_coverage_gnuplot(&rows, &mut buf).map_err(|e| CliError::Output(e.to_string()))?;
    } else {
        write_csv(&rows, &mut buf)?;
    }
    emit(a.output.output.as_deref(), out, &buf)
}

fn write_adr_rows(rows: &[AdrRow], o: &OutputArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut buf = Vec::new();
    if o.gnuplot {
        write_adr_gnuplot(rows, &mut buf).map_err(|e| CliError::Output(e.to_string()))?;
    } else {
        write_csv(rows, &mut buf)?;
    }
    emit(o.output.as_deref(), out, &buf)
}

fn run_adr(a: &AdrArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    let engine = single_engine(a.engine, &a.sim, "adr")?;
    let sc = load_scenario(&a.scenario, Some(&a.point))?;
    let report = match engine {
        Engine::Analytic => ws_adr(&sc)?,
        Engine::Simulated(s) => {
            let e = estimate_adr_report(&sc, &s)?;
            log_line(
                log,
                &format!(
                    "95% half-widths: adr_ns {} adr_nr {} adr_t {}",
                    e.half_widths[0], e.half_widths[1], e.half_widths[2]
                ),
            );
            e.report
        }
    };
    write_adr_rows(&[AdrRow::from(&report)], &a.output, out)
}

fn summary(result: &SweepResult, near_tol: f64) -> Vec<String> {
    let total = result.reports.len();
    let Some(opt) = result.optimum(near_tol) else {
        return vec![format!("best: none (all {total} cells infeasible)")];
    };
    let fmt_points = |pts: &[zoneshare::analytic::OperatingPoint]| {
        pts.iter()
            .map(|p| format!("({} m, {})", p.protection_radius, p.shared_fraction))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let b = &opt.best;
    vec![
        format!(
            "best: rp_m={} omega_s={} ws_adr={} ({} of {total} cells feasible)",
            b.operating_point.protection_radius,
            b.operating_point.shared_fraction,
            b.ws_adr,
            opt.feasible_points
        ),
        format!("ties ({}): {}", opt.ties.len(), fmt_points(&opt.ties)),
        format!(
            "within {}% of best ({}): {}",
            near_tol * 100.0,
            opt.near_optimal.len(),
            fmt_points(&opt.near_optimal)
        ),
    ]
}

fn run_sweep(a: &SweepArgs, out: &mut dyn Write, log: &mut dyn Write, optimize: bool) -> Result<(), CliError> {
    let command = if optimize { "optimize" } else { "sweep" };
    let engine = single_engine(a.engine, &a.sim, command)?;
    if !(a.near_tol >= 0.0 && a.near_tol < 1.0) {
        return Err(CliError::Usage(format!("--near-tol must lie in [0, 1), got {}", a.near_tol)));
    }
    let rps: Vec<f64> = parse_axis(&a.grid.rp_km, "--rp-km")?.iter().map(|r| r * 1e3).collect();
    let omegas = parse_axis(&a.grid.omega, "--omega")?;
    let grid = SweepGrid::new(rps, omegas)?;
    let sc = load_scenario(&a.scenario, None)?;
    let result = sweep(&sc, &grid, &engine, execution(&a.sim))?;

    for line in summary(&result, a.near_tol) {
        log_line(log, &line);
    }
    let rows: Vec<AdrRow> = if optimize {
        zoneshare::optimizer::near_optimal(&result.reports, a.near_tol)
            .iter()
            .map(AdrRow::from)
            .collect()
    } else {
        result.reports.iter().map(AdrRow::from).collect()
    };
    write_adr_rows(&rows, &a.output, out)
}

fn run_scene(a: &SceneArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sc = load_scenario(&a.scenario, Some(&a.point))?;
    let scene = sample_scene(&sc, a.seed, a.trial)?;
    let rows: Vec<SceneRow> = scene.nodes(sc.void_probability()).iter().map(SceneRow::from).collect();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    emit(a.output.as_deref(), out, &buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_specs() {
        assert_eq!(parse_axis("0:1:0.25", "--omega").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_axis("3, 1.5,", "--rp-km").unwrap(), vec![3.0, 1.5]);
        assert!(parse_axis("", "--omega").is_err());
        assert!(parse_axis("1:2", "--omega").is_err());
        assert!(parse_axis("a,b", "--omega").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(Error::ConfigFile("x".into())).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Unbounded("x".into())).exit_code(), 3);
        let wrapped = Error::GridPoint {
            rp_m: 0.0,
            omega_s: 0.0,
            source: Box::new(Error::StepUnderflow(0.0)),
        };
        assert_eq!(CliError::Core(wrapped).exit_code(), 3);
    }
}
