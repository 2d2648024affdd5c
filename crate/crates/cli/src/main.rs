//! Command-line harness for the boundary point-vortex method.
//!
//! Every subcommand reads a versioned JSON config. With `--out`, the main
//! artifact (CSV, or the JSON report for `identities`) goes to that file and
//! a JSON summary to stdout; without it the artifact goes to stdout and the
//! summary to stderr. Failures print a JSON error object on stderr.
//!
//! Exit codes: 0 success, 1 check failure, 2 invalid input, 3 runtime abort.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{load, DEFAULT_SEED};
use report::{CliError, Outcome};

#[derive(Parser)]
#[command(name = "vortex-panel", version, about = "Boundary point-vortex method for flow outside the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep mesh sizes and fit the error decay slope.
    Converge(Common),
    /// Check the exact identities of the method.
    Identities(Common),
    /// Integrate free vortices around the obstacle.
    Simulate(Common),
    /// Sample velocity fields at a set of points.
    Field(Common),
    /// Hilbert-transform sampled periodic data.
    Hilbert(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Write the main artifact here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, value_name = "INT", default_value_t = 1)]
    workers: usize,
    /// Multiplies every identity tolerance.
    #[arg(long, value_name = "FLOAT")]
    tolerance_scale: Option<f64>,
}

fn run(command: &Command) -> Result<(Outcome, Option<PathBuf>), CliError> {
    match command {
        Command::Converge(c) => {
            let cfg: config::ConvergeConfig = load(&c.config)?;
            if c.workers == 0 {
                return Err(CliError::invalid("--workers must be at least 1"));
            }
            Ok((commands::converge::run(&cfg, c.workers)?, c.out.clone().or(cfg.output)))
        }
        Command::Identities(c) => {
            let cfg: config::IdentitiesConfig = load(&c.config)?;
            let seed = c.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            let scale = c.tolerance_scale.unwrap_or(cfg.tolerance_scale);
            Ok((commands::identities::run(&cfg, seed, scale)?, c.out.clone().or(cfg.output)))
        }
        Command::Simulate(c) => {
            let cfg: config::SimulateConfig = load(&c.config)?;
            Ok((commands::simulate::run(&cfg)?, c.out.clone().or(cfg.output)))
        }
        Command::Field(c) => {
            let cfg: config::FieldConfig = load(&c.config)?;
            Ok((commands::field::run(&cfg)?, c.out.clone().or(cfg.output)))
        }
        Command::Hilbert(c) => {
            let cfg: config::HilbertConfig = load(&c.config)?;
            Ok((commands::hilbert::run(&cfg)?, c.out.clone().or(cfg.output)))
        }
    }
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<(), CliError> {
    let summary = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes") + "\n";
    let write_err = |e: std::io::Error| CliError::io(format!("write failed: {e}"));
    match (out, &outcome.primary) {
        (Some(path), Some(primary)) => {
            std::fs::write(path, primary)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
            std::io::stdout().write_all(summary.as_bytes()).map_err(write_err)?;
        }
        (None, Some(primary)) => {
            std::io::stdout().write_all(primary.as_bytes()).map_err(write_err)?;
            std::io::stderr().write_all(summary.as_bytes()).map_err(write_err)?;
        }
        (Some(path), None) => {
            std::fs::write(path, &summary)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        }
        (None, None) => std::io::stdout().write_all(summary.as_bytes()).map_err(write_err)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("VORTEX_PANEL_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|(outcome, out)| {
        emit(&outcome, out.as_deref())?;
        Ok(outcome.exit)
    });
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            log::debug!("{}", e.message);
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit as u8)
        }
    }
}
