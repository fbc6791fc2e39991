//! Command line front end: configuration files in, CSV files out.

pub mod checks;
pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use crate::analysis::{space_study, time_study, AnalysisError, ConvergenceTable, Protocol};
use crate::mesh::Mesh1D;
use crate::model::{validate_assumptions, ModelError};
use crate::stepper::{run, StepError, Trajectory};

pub use checks::{run_invariant_suite, InvariantReport};
pub use config::{parse_config, parse_config_with_mode, ConfigError, Mode, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "front-fem",
    version,
    about = "Moving-interface diffusion solver"
)]
pub struct Args {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` in the file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// simulate | convergence-space | convergence-time | check-invariants
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Print nothing but errors.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("invariant violation:\n{0}")]
    Violation(InvariantReport),
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Config(e.into())
    }
}

fn step_code(e: &StepError) -> u8 {
    match e {
        StepError::StabilityBreakdown { .. } => 3,
        _ => 2,
    }
}

impl CliError {
    /// 1 I/O, 2 configuration, 3 stability breakdown, 4 invariant violation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Csv(_) => 1,
            CliError::Config(_) => 2,
            CliError::Step(e) => step_code(e),
            CliError::Analysis(
                AnalysisError::Run { error, .. } | AnalysisError::Reference { error, .. },
            ) => step_code(error),
            CliError::Analysis(AnalysisError::Mesh(_) | AnalysisError::EmptyStudy) => 2,
            CliError::Analysis(_) => 1,
            CliError::Violation(report) => {
                if report.breakdown.is_some() {
                    3
                } else {
                    4
                }
            }
        }
    }
}

/// What a successful command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Parses arguments, runs the command and maps the result to an exit code.
pub fn main_with_args(args: Args) -> ExitCode {
    match execute(&args) {
        Ok(outcome) => {
            if !args.quiet {
                print!("{}", outcome.summary);
                for f in &outcome.files {
                    println!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn execute(args: &Args) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&args.config).map_err(|source| CliError::Io {
        path: args.config.clone(),
        source,
    })?;
    let mut cfg = parse_config_with_mode(&text, args.mode)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    match cfg.mode {
        Mode::Simulate => cmd_simulate(&cfg),
        Mode::ConvergenceSpace | Mode::ConvergenceTime => cmd_convergence(&cfg),
        Mode::CheckInvariants => cmd_check(&cfg),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn run_settings(cfg: &RunConfig) -> Result<(usize, f64), CliError> {
    match (cfg.n_nodes, cfg.dt) {
        (Some(n), Some(dt)) => Ok((n, dt)),
        _ => Err(ConfigError::Missing(vec!["n_nodes".into(), "dt".into()]).into()),
    }
}

fn write_run(cfg: &RunConfig, traj: &Trajectory, suffix: &str) -> Result<Vec<PathBuf>, CliError> {
    let traj_path = cfg.output_dir.join(format!("trajectory.csv{suffix}"));
    let iface_path = cfg.output_dir.join(format!("interface.csv{suffix}"));
    output::write_trajectory(&traj_path, traj, &cfg.physical)?;
    output::write_interface(&iface_path, traj)?;
    Ok(vec![traj_path, iface_path])
}

/// One run at `(n_nodes, dt)`. On a breakdown the states computed so far
/// are written with a `.partial` suffix before the error is returned.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = cfg.dimensionless()?;
    let (n, dt) = run_settings(cfg)?;
    let mesh = Mesh1D::uniform(n).map_err(StepError::from)?;
    let report = validate_assumptions(&d);
    create_dir(&cfg.output_dir)?;
    match run(&d, &mesh, dt, cfg.record_every) {
        Ok(traj) => {
            let files = write_run(cfg, &traj, "")?;
            let diag = &traj.diagnostics;
            let summary = format!(
                "{report}simulate: {} steps, W(T) = {}, U in [{}, {}]\n",
                diag.steps, diag.w_final, diag.u_min, diag.u_max
            );
            Ok(Outcome { files, summary })
        }
        Err(failure) => {
            if let Some(partial) = &failure.partial {
                write_run(cfg, partial, ".partial")?;
            }
            Err(failure.error.into())
        }
    }
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = cfg.dimensionless()?;
    let table: ConvergenceTable = match cfg.mode {
        Mode::ConvergenceTime => time_study(&d, &cfg.time)?,
        _ => space_study(&d, &cfg.space)?,
    };
    create_dir(&cfg.output_dir)?;
    let csv_path = cfg.output_dir.join(output::table_file_name(table.protocol));
    output::write_table(&csv_path, &table)?;
    let plot_path = cfg.output_dir.join(match table.protocol {
        Protocol::Space => "plot_space.gp",
        Protocol::Time => "plot_time.gp",
    });
    output::write_gnuplot_script(&plot_path, table.protocol).map_err(|source| CliError::Io {
        path: plot_path.clone(),
        source,
    })?;
    Ok(Outcome {
        files: vec![csv_path, plot_path],
        summary: table.to_string(),
    })
}

pub fn cmd_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = cfg.dimensionless()?;
    let (n, dt) = run_settings(cfg)?;
    let report = run_invariant_suite(&d, n, dt);
    if report.all_passed() {
        Ok(Outcome {
            files: Vec::new(),
            summary: report.to_string(),
        })
    } else {
        Err(CliError::Violation(report))
    }
}
