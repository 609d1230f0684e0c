//! Command-line front end: geometry/config ingestion, frequency sweeps,
//! and machine-readable outputs for modes, thresholds, ledgers and
//! scattering matrices.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure,
//! 4 empty sweep band after threshold skipping.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cylwave_cli::{commands, config, CliError};

#[derive(Parser)]
#[command(name = "cylwave", version, about = "Waveguide spectral toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration file (flat `section.key = value` text).
    #[arg(long, global = true, default_value = "cylwave.cfg")]
    config: PathBuf,
    /// Output directory; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-section Helmholtz eigenvalues.
    Modes,
    /// Threshold frequencies of all ends.
    Thresholds,
    /// Per-frequency wave inventory.
    Ledger,
    /// Scattering matrices over the sweep.
    Scatter,
    /// Radiation coefficients of a windowed-mode source.
    Radiate,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", cli.config.display()))
    })?;
    let base = cli
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let mut config = config::parse_config(&text, &base)?;
    if let Some(out) = &cli.out {
        config.output.path = Some(out.clone());
    }
    let name = match cli.command {
        Command::Modes => "modes",
        Command::Thresholds => "thresholds",
        Command::Ledger => "ledger",
        Command::Scatter => "scatter",
        Command::Radiate => "radiate",
    };
    commands::run_command(name, &config, cli.verbose)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cylwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
