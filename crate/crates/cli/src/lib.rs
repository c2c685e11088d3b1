//! Command-line front end: JSON configuration in, CSV or JSON tables and
//! optional SVG plots out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::plot::Scale;

#[derive(Debug, Parser)]
#[command(
    name = "gthresh",
    version,
    about = "Noise strength and threshold estimates for Gaussian non-Markovian noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Relative tolerance for adaptive quadrature.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write an SVG plot of the main table here.
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Scale::Linear)]
    pub plot_scale: Scale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bath correlation function on a time grid.
    Spectrum,
    /// Noise strength for the configured model and schedule.
    Strength,
    /// Noise strength at each concatenation level.
    Levels,
    /// Threshold estimates from gadget counts.
    Threshold,
    /// Dephasing exponent, flip probability and CNOT gadget bound.
    Dephasing,
    /// Run the brute-force oracle suites.
    Verify,
    /// Everything the configuration supports, in one report.
    Report,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(e, path))
}

/// Runs one command; on success the report has been written.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::config("--tol must lie in (0, 1)", None));
        }
    }
    let cfg = match (&cli.config, cli.command) {
        (Some(path), _) => config::load(path)?,
        (None, Command::Verify) => RunConfig::default(),
        (None, _) => return Err(CliError::config("this command needs --config", None)),
    };

    let mut failed = Vec::new();
    let output = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg, cli.tol)?,
        Command::Strength => commands::strength(&cfg, cli.tol)?,
        Command::Levels => commands::levels(&cfg)?,
        Command::Threshold => commands::threshold(&cfg)?,
        Command::Dephasing => commands::dephasing(&cfg, cli.tol)?,
        Command::Verify => {
            let (out, f) = commands::verify()?;
            failed = f;
            out
        }
        Command::Report => commands::report(&cfg, cli.tol)?,
    };

    let format = cli.format.or(cfg.output_format()).unwrap_or_default();
    let text = match format {
        Format::Csv => output.report.to_csv(),
        Format::Json => output.report.to_json(),
    };
    let out_path = cli.out.clone().or_else(|| cfg.output_path().map(PathBuf::from));
    match out_path {
        Some(p) => write_file(&p, text.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(e, Path::new("<stdout>")))?;
        }
    }
    if let Some(p) = &cli.plot {
        let plot = output
            .plot
            .as_ref()
            .ok_or_else(|| CliError::config("this command has no plot", None))?;
        write_file(p, plot.to_svg(cli.plot_scale).as_bytes())?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed { failed })
    }
}
