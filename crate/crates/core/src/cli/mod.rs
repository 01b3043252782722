//! The `aloha-corr` command line.
//!
//! Every command writes one CSV and a `<stem>.manifest.json` next to it.
//! Parameters resolve as flags over config file over built-in defaults.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation failure,
//! 3 numeric non-convergence.

pub mod commands;
pub mod output;
pub mod params;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::analytic::FadingModel;
use crate::error::Error;

use output::{manifest_path, write_file, RunManifest, Table};
use params::{Fig1Params, Fig2Params, MomentsParams, ValidateParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("validation failed: {failed} of {total} rows outside tolerance")]
    ValidationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::ValidationFailed { .. } => EXIT_VALIDATION,
            CliError::Core(Error::NonConvergence { .. }) => EXIT_NON_CONVERGENCE,
            CliError::Core(
                Error::Statistical(_) | Error::UndefinedCorrelation(_) | Error::SingularGeometry { .. },
            ) => EXIT_VALIDATION,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "aloha-corr",
    version,
    about = "Interference and outage correlation in slotted-ALOHA Poisson networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spatial correlation curve zeta/p against separation for several epsilons.
    Fig1(Fig1Args),
    /// Unconditional and conditional link success against the ALOHA probability.
    Fig2(Fig2Args),
    /// Analytic values against Monte Carlo estimates over a parameter grid.
    Validate(ValidateArgs),
    /// Mean and variance of the interference for one configuration.
    Moments(MomentsArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Output CSV path; the manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON config file (or a previous run manifest).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// none, rayleigh or nakagami:<m>
    #[arg(long)]
    pub fading: Option<String>,
    /// Comma-separated softening constants.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    /// Comma-separated separations.
    #[arg(long, value_delimiter = ',')]
    pub separations: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Softening constant; 0 is the singular path loss.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub link_distance: Option<f64>,
    /// Comma-separated ALOHA probabilities.
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub truncation_tolerance: Option<f64>,
    /// Use the bootstrap instead of the Fisher standard error for correlations.
    #[arg(long)]
    pub bootstrap: bool,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub fading: Option<String>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub truncation_tolerance: Option<f64>,
}

fn set<T>(target: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *target = v;
    }
}

fn parse_fading(flag: Option<String>) -> Result<Option<FadingModel>, CliError> {
    flag.map(|s| s.parse().map_err(|e: Error| CliError::Usage(e.to_string())))
        .transpose()
}

fn resolve_fig1(args: Fig1Args) -> Result<Fig1Params, CliError> {
    let mut p: Fig1Params = params::load(args.common.config.as_deref())?;
    set(&mut p.alpha, args.alpha);
    set(&mut p.lambda, args.lambda);
    set(&mut p.p, args.p);
    set(&mut p.fading, parse_fading(args.fading)?);
    set(&mut p.epsilons, args.epsilons);
    set(&mut p.separations, args.separations);
    set(&mut p.seed, args.common.seed);
    set(&mut p.out, args.common.out);
    Ok(p)
}

fn resolve_fig2(args: Fig2Args) -> Result<Fig2Params, CliError> {
    let mut p: Fig2Params = params::load(args.common.config.as_deref())?;
    set(&mut p.alpha, args.alpha);
    set(&mut p.epsilon, args.epsilon);
    set(&mut p.lambda, args.lambda);
    set(&mut p.theta, args.theta);
    set(&mut p.link_distance, args.link_distance);
    set(&mut p.p_grid, args.p_grid);
    set(&mut p.seed, args.common.seed);
    set(&mut p.out, args.common.out);
    Ok(p)
}

fn resolve_validate(args: ValidateArgs) -> Result<ValidateParams, CliError> {
    let mut p: ValidateParams = params::load(args.common.config.as_deref())?;
    set(&mut p.replications, args.replications);
    set(&mut p.workers, args.workers);
    set(&mut p.truncation_tolerance, args.truncation_tolerance);
    if args.bootstrap {
        p.correlation_error = crate::montecarlo::CorrelationError::bootstrap();
    }
    set(&mut p.seed, args.common.seed);
    set(&mut p.out, args.common.out);
    Ok(p)
}

fn resolve_moments(args: MomentsArgs) -> Result<MomentsParams, CliError> {
    let mut p: MomentsParams = params::load(args.common.config.as_deref())?;
    set(&mut p.lambda, args.lambda);
    set(&mut p.p, args.p);
    set(&mut p.alpha, args.alpha);
    set(&mut p.epsilon, args.epsilon);
    set(&mut p.fading, parse_fading(args.fading)?);
    set(&mut p.replications, args.replications);
    set(&mut p.workers, args.workers);
    set(&mut p.truncation_tolerance, args.truncation_tolerance);
    set(&mut p.seed, args.common.seed);
    set(&mut p.out, args.common.out);
    Ok(p)
}

/// Writes the CSV and its manifest; returns the manifest path.
pub fn emit<P: Serialize>(
    command: &str,
    params: &P,
    seed: Option<u64>,
    out: &Path,
    table: &Table,
    started: Instant,
) -> Result<PathBuf, CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    let csv = table.to_csv();
    write_file(out, csv.as_bytes()).map_err(io(out))?;
    let parameters = serde_json::to_value(params)
        .map_err(|e| CliError::Usage(format!("cannot serialize parameters: {e}")))?;
    let mut manifest = RunManifest::new(command, seed, parameters);
    manifest.record(out, csv.as_bytes());
    manifest.finish(started.elapsed());
    let path = manifest_path(out);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&path, json.as_bytes()).map_err(io(&path))?;
    Ok(path)
}

pub fn execute(command: Command) -> Result<(), CliError> {
    let started = Instant::now();
    match command {
        Command::Fig1(args) => {
            let p = resolve_fig1(args)?;
            let table = commands::fig1(&p)?;
            emit("fig1", &p, Some(p.seed), &p.out, &table, started)?;
            println!("wrote {} ({} rows)", p.out.display(), table.len());
        }
        Command::Fig2(args) => {
            let p = resolve_fig2(args)?;
            let table = commands::fig2(&p)?;
            emit("fig2", &p, Some(p.seed), &p.out, &table, started)?;
            println!("wrote {} ({} rows)", p.out.display(), table.len());
        }
        Command::Moments(args) => {
            let p = resolve_moments(args)?;
            let table = commands::moments(&p)?;
            emit("moments", &p, Some(p.seed), &p.out, &table, started)?;
            print!("{}", table.to_csv());
        }
        Command::Validate(args) => {
            let p = resolve_validate(args)?;
            let report = commands::validate(&p)?;
            emit("validate", &p, Some(p.seed), &p.out, &report.table, started)?;
            for row in report.table.rows() {
                let status = if row[6] == "true" { "PASS" } else { "FAIL" };
                println!("{status} {:<22} {} z={}", row[0], row[1], row[5]);
            }
            if report.failures > 0 {
                return Err(CliError::ValidationFailed {
                    failed: report.failures,
                    total: report.table.len(),
                });
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
