//! The `fishsim` command-line front end.
//!
//! ```text
//! fishsim <simulate|check|periodic|converge|sweep> --config <file> --out <dir> [--jobs N] [--strict]
//! ```
//!
//! Exit status is 0 on success, 1 on input errors (arguments,
//! configuration, or unmet preconditions under `--strict`) and 2 on
//! runtime failures such as overflow. Diagnostics go to stderr only.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::analysis::{
    find_periodic_solution_from, sweep, verify_attraction, verify_local_stability, AnalysisError,
    AttractionOptions, LocalStabilityOptions, LocalStabilityReport, PeriodicOptions, SweepOptions,
    CONVERGENCE_CSV_HEADER,
};
use crate::conditions::{
    check_equilibrium_attraction, check_global_attraction, check_local_stability,
};
use crate::config::{parse_config, ExperimentConfig};
use crate::engine::{integrate, EngineError};
use crate::model::ModelError;
use crate::output::{downsample_indices, fmt_f64, two_column_csv};
use crate::report::{ConditionReport, REPORT_CSV_HEADER};

/// Rows kept in the downsampled plotting copies.
pub const PLOT_POINTS: usize = 1000;
/// Name of the resolved configuration written next to every output.
pub const RESOLVED_CONFIG: &str = "resolved_config.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Integrate the model and write the trajectory.
    Simulate,
    /// Evaluate the sufficient conditions.
    Check,
    /// Locate the periodic solution.
    Periodic,
    /// Compare solutions from several initial functions.
    Converge,
    /// Evaluate conditions and attraction over a parameter grid.
    Sweep,
}

#[derive(Debug, Parser)]
#[command(
    name = "fishsim",
    version,
    about = "Delayed fishery model simulation and stability checks"
)]
pub struct Args {
    pub command: Command,
    /// Experiment configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for `sweep`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Treat unmet sufficient conditions as errors instead of warnings.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidInput(_)
            | EngineError::InvalidControl(_)
            | EngineError::Model(_) => CliError::Input(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Engine(inner) => inner.into(),
            AnalysisError::Run { index, source } => match CliError::from(source) {
                CliError::Input(m) => CliError::Input(format!("run {index} failed: {m}")),
                CliError::Runtime(m) => CliError::Runtime(format!("run {index} failed: {m}")),
            },
            AnalysisError::Model(_)
            | AnalysisError::Precondition(_)
            | AnalysisError::InvalidInput(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = parse_config(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?
        .resolve()
        .map_err(|e| CliError::Input(e.to_string()))?;

    let files = match args.command {
        Command::Simulate => simulate(&cfg)?,
        Command::Check => check(&cfg),
        Command::Periodic => periodic(&cfg, args.strict)?,
        Command::Converge => converge(&cfg, args.strict)?,
        Command::Sweep => run_sweep(&cfg, args.jobs.into())?,
    };

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", args.out.display())))?;
    write(&args.out, RESOLVED_CONFIG, &cfg.to_toml())?;
    for (name, body) in files {
        write(&args.out, name, &body)?;
    }
    Ok(())
}

type Files = Vec<(&'static str, String)>;

fn write(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, body)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn warn(strict: bool, what: &str, text: Option<String>) -> Result<Option<String>, CliError> {
    match text {
        Some(t) if strict => Err(CliError::Input(format!(
            "{what}: sufficient conditions not satisfied:\n{t}"
        ))),
        Some(t) => {
            eprintln!("warning: {what}: sufficient conditions not satisfied; proceeding\n{t}");
            Ok(Some(t))
        }
        None => Ok(None),
    }
}

fn plot_csv(points: &[(f64, f64)]) -> String {
    two_column_csv(
        ("t", "N"),
        downsample_indices(points.len(), PLOT_POINTS)
            .into_iter()
            .map(|i| points[i]),
    )
}

fn simulate(cfg: &ExperimentConfig) -> Result<Files, CliError> {
    let history = cfg
        .history
        .as_ref()
        .expect("resolved configuration has a history");
    let t_end = cfg.run.t_end.expect("resolved configuration has t_end");
    let traj = integrate(&cfg.model_params(), history, t_end, &cfg.run.control)?;
    let points: Vec<_> = traj.points().collect();
    let mut files = vec![(
        "trajectory.csv",
        two_column_csv(("t", "N"), points.iter().copied()),
    )];
    if cfg.run.plot {
        files.push(("trajectory_plot.csv", plot_csv(&points)));
    }
    Ok(files)
}

fn reports(cfg: &ExperimentConfig) -> Vec<ConditionReport> {
    let mut out = vec![check_global_attraction(&cfg.model_params())];
    if let Some(pp) = &cfg.proportional {
        out.push(check_equilibrium_attraction(pp));
        out.push(check_local_stability(pp));
    }
    out
}

fn check(cfg: &ExperimentConfig) -> Files {
    let reports = reports(cfg);
    let mut csv = format!("report,{REPORT_CSV_HEADER}\n");
    let mut text = String::new();
    for r in &reports {
        for row in r.csv_rows().lines() {
            let _ = writeln!(csv, "{},{row}", r.title);
        }
        text.push_str(&r.to_text());
    }
    vec![("conditions.csv", csv), ("conditions.txt", text)]
}

fn periodic(cfg: &ExperimentConfig, strict: bool) -> Result<Files, CliError> {
    let history = cfg
        .history
        .as_ref()
        .expect("resolved configuration has a history");
    let opts = PeriodicOptions {
        transient_periods: cfg.run.transient_periods,
        tol: cfg.run.periodic_tolerance,
        warn_and_proceed: !strict,
    };
    let orbit = find_periodic_solution_from(&cfg.model_params(), history, &cfg.run.control, opts)?;
    warn(strict, "periodic", orbit.warning.clone())?;
    let (lo, hi) = orbit.extrema()?;
    let mut text = String::new();
    let _ = writeln!(text, "period = {}", fmt_f64(orbit.period));
    let _ = writeln!(text, "start = {}", fmt_f64(orbit.start));
    let _ = writeln!(text, "transient_used = {}", fmt_f64(orbit.transient_used));
    let _ = writeln!(text, "residual = {}", fmt_f64(orbit.residual));
    let _ = writeln!(text, "tolerance = {}", fmt_f64(opts.tol));
    let _ = writeln!(text, "converged = {}", orbit.converged);
    let _ = writeln!(text, "min = {}", fmt_f64(lo));
    let _ = writeln!(text, "max = {}", fmt_f64(hi));
    if let Some(w) = &orbit.warning {
        let _ = writeln!(text, "warning: sufficient conditions not satisfied\n{w}");
    }
    let mut files = vec![("orbit.csv", orbit.to_csv()), ("periodic.txt", text)];
    if cfg.run.plot {
        let points: Vec<_> = orbit.points().collect();
        files.push(("orbit_plot.csv", plot_csv(&points)));
    }
    Ok(files)
}

/// Header of `local_stability.csv`.
pub const LOCAL_CSV_HEADER: &str = "run,sup_diff_last_period,decay_rate_estimate,converged,final";

fn local_csv(rep: &LocalStabilityReport) -> String {
    let mut out = format!("{LOCAL_CSV_HEADER}\n");
    for (name, r, fin) in [
        ("linear", &rep.linear, rep.linear_final),
        ("nonlinear", &rep.nonlinear, rep.nonlinear_final_relative),
    ] {
        let _ = writeln!(
            out,
            "{name},{},{},{},{}",
            fmt_f64(r.sup_diff_last_period),
            r.decay_rate_estimate.map(fmt_f64).unwrap_or_default(),
            r.converged,
            fmt_f64(fin)
        );
    }
    out
}

fn converge(cfg: &ExperimentConfig, strict: bool) -> Result<Files, CliError> {
    let opts = AttractionOptions {
        tol: cfg.run.tolerance,
    };
    let pairs = verify_attraction(
        &cfg.model_params(),
        &cfg.histories,
        &cfg.run.control,
        cfg.run.horizon_periods,
        opts,
    )?;
    let mut csv = format!("{CONVERGENCE_CSV_HEADER}\n");
    for p in &pairs {
        csv.push_str(&p.csv_row());
        csv.push('\n');
    }
    let mut files = vec![("convergence.csv", csv)];
    if let Some(pp) = &cfg.proportional {
        let lopts = LocalStabilityOptions {
            tol: cfg.run.tolerance,
            warn_and_proceed: !strict,
        };
        let t_end = cfg.run.t_end.expect("resolved configuration has t_end");
        let rep = verify_local_stability(pp, cfg.run.perturbation, &cfg.run.control, t_end, lopts)?;
        warn(strict, "local stability", rep.warning.clone())?;
        files.push(("local_stability.csv", local_csv(&rep)));
    }
    Ok(files)
}

fn run_sweep(cfg: &ExperimentConfig, jobs: usize) -> Result<Files, CliError> {
    let Some(s) = &cfg.sweep else {
        return Err(CliError::Input("sweep: missing [sweep] section".into()));
    };
    let opts = SweepOptions {
        control: cfg.run.control.clone(),
        horizon_periods: cfg.run.horizon_periods,
        tol: cfg.run.tolerance,
        jobs,
    };
    let table = sweep(&cfg.sweep_base(), [s.axis1, s.axis2], &opts)?;
    Ok(vec![("sweep.csv", table.to_csv())])
}
