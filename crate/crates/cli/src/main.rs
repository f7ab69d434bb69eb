//! `kmu`: run the (κ,μ) pipelines on a model config.

mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kappa_mu::models::load_model_config;
use kappa_mu::Error;

use pipeline::{execute, Command};

#[derive(Parser)]
#[command(name = "kmu", version, about = "Numerical workbench for contact metric (κ,μ)-spaces")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Check the contact metric axioms and the h identities.
    Validate(RunArgs),
    /// Fit (κ, μ), report the index and regime.
    Fit(RunArgs),
    /// Error tensor, canonical Kähler base and conformal verdict (|I| > 1).
    Descend(RunArgs),
    /// Enumerate the almost para-Kähler base structures (|I| < 1).
    Para(RunArgs),
    /// Lift the canonical base structure to a Sasakian one (|I| > 1).
    Lift(RunArgs),
    /// Classify a grid of Milnor parameters by regime.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Model config, JSON or TOML.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    tol_algebraic: Option<f64>,
    #[arg(long)]
    tol_fd: Option<f64>,
}

fn run(command: Command, args: &RunArgs) -> Result<bool, Error> {
    let mut config = load_model_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    if let Some(t) = args.tol_algebraic {
        config.tolerances.algebraic = t;
    }
    if let Some(t) = args.tol_fd {
        config.tolerances.finite_difference = t;
    }
    config.validate()?;

    let report = execute(command, &config)?;
    print!("{}", report.to_table());
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        CliCommand::Validate(a) => (Command::Validate, a),
        CliCommand::Fit(a) => (Command::Fit, a),
        CliCommand::Descend(a) => (Command::Descend, a),
        CliCommand::Para(a) => (Command::Para, a),
        CliCommand::Lift(a) => (Command::Lift, a),
        CliCommand::Sweep(a) => (Command::Sweep, a),
    };
    match run(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("kmu: {e}");
            ExitCode::from(2)
        }
    }
}
