//! `relay-rtm run|explain <config.json>`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::{load_config, ConfigError, RunConfig};
use crate::explain::explain_report;
use crate::montecarlo::{run_sweep, CurvePoint, SweepError};
use crate::output::{summary_table, write_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "relay-rtm",
    version,
    about = "Optimal relay transform matrices for MIMO AF relay networks"
)]
pub struct Cli {
    /// Worker threads for the Monte Carlo engine (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Write the CSV here instead of the config's `output`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured sweep and write the CSV.
    Run { config: PathBuf },
    /// Print the single-realization report for the config's `explain` section.
    Explain { config: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("{0}")]
    Numerical(#[from] relay_rtm_core::Error),
    #[error("cannot write {path}: {message}")]
    Output { path: PathBuf, message: String },
    #[error("the config has no explain section")]
    NoExplain,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Sweep(SweepError::Trial { .. } | SweepError::Evaluation { .. })
            | CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

/// Runs the sweep and writes the CSV to `cfg.output_path`.
pub fn run(cfg: &RunConfig, threads: Option<usize>) -> Result<Vec<CurvePoint>, CliError> {
    let points = run_sweep(&cfg.sweep, threads)?;
    write_csv_file(&points, &cfg.output_path)?;
    Ok(points)
}

fn write_csv_file(points: &[CurvePoint], path: &Path) -> Result<(), CliError> {
    let fail = |message: String| CliError::Output {
        path: path.to_path_buf(),
        message,
    };
    let file = std::fs::File::create(path).map_err(|e| fail(e.to_string()))?;
    write_csv(points, std::io::BufWriter::new(file)).map_err(|e| fail(e.to_string()))
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let threads = cli.threads.map(usize::from);
    match cli.command {
        Command::Run { config } => {
            let mut cfg = load_config(&config)?;
            if let Some(path) = cli.output {
                cfg.output_path = path;
            }
            let points = run(&cfg, threads)?;
            let _ = write!(
                out,
                "{}",
                summary_table(&points, cfg.sweep.sweep_axis.name())
            );
            let _ = writeln!(
                out,
                "wrote {} rows to {}",
                points.len(),
                cfg.output_path.display()
            );
        }
        Command::Explain { config } => {
            let cfg = load_config(&config)?;
            if cfg.explain.is_none() {
                return Err(CliError::NoExplain);
            }
            let _ = write!(out, "{}", explain_report(&cfg)?);
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and executes the command;
/// returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 {
                EXIT_OK
            } else {
                EXIT_CONFIG
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
