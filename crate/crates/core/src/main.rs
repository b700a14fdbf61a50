use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use ntrailer::cli::{self, CommandOutput, RunConfig};
use ntrailer::model::VehicleParams;
use ntrailer::Result;

/// Inertial dynamics of a car pulling n trailers.
///
/// Log verbosity is read from NTRAILER_LOG (error, warn, info, debug, trace).
#[derive(Parser)]
#[command(name = "ntrailer", version)]
struct Args {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Write the data file here instead of stdout (overrides the config).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized checks (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate the reduced equations, optionally with the planar motion.
    Simulate,
    /// Relative equilibria and their stability.
    Equilibria,
    /// Grid of trajectories on an energy torus.
    Portrait,
    /// Single-trailer period over a sweep of energies.
    Period,
    /// Single-trailer net motion over one period.
    Holonomy,
    /// Degree of nonholonomy over a grid of relative angles.
    Brackets,
    /// Residuals of the closed forms against independent computations.
    Verify,
}

fn load(args: &Args) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::new(VehicleParams::default()),
    };
    if let Some(out) = &args.output {
        config.output = Some(out.clone());
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn emit(config: &RunConfig, output: &CommandOutput) -> Result<()> {
    match &config.output {
        Some(path) => {
            std::fs::write(path, &output.artifact)?;
            info!("wrote {}", path.display());
            println!("{}", serde_json::to_string_pretty(&output.summary)?);
        }
        None => {
            std::io::stdout().write_all(output.artifact.as_bytes())?;
            eprintln!("{}", serde_json::to_string_pretty(&output.summary)?);
        }
    }
    Ok(())
}

fn run(args: &Args) -> Result<bool> {
    let config = load(args)?;
    let output = match args.command {
        Command::Simulate => cli::cmd_simulate(&config)?,
        Command::Equilibria => cli::cmd_equilibria(&config)?,
        Command::Portrait => cli::cmd_portrait(&config)?,
        Command::Period => cli::cmd_period(&config)?,
        Command::Holonomy => cli::cmd_holonomy(&config)?,
        Command::Brackets => cli::cmd_brackets(&config)?,
        Command::Verify => {
            let (output, report) = cli::cmd_verify(&config)?;
            emit(&config, &output)?;
            return Ok(report.passed);
        }
    };
    emit(&config, &output)?;
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NTRAILER_LOG", "warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: verification failed");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}
