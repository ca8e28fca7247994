//! `meetlab`: reproducible experiments on meeting times of random walks.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for invalid input and 3 for numerical failures.

mod commands;
mod config;
mod error;
mod source;

use clap::{Parser, Subcommand};

use crate::error::{invalid, CliResult};

#[derive(Parser)]
#[command(
    name = "meetlab",
    version,
    about = "Meeting times of two stationary random walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random regular graph; write it with its gap and census reports.
    Generate(commands::generate::GenerateArgs),
    /// Exact meeting-time quantities and identity residuals.
    Exact(commands::exact::ExactArgs),
    /// Monte Carlo meeting times against the exponential limit.
    Simulate(commands::simulate::SimulateArgs),
    /// Kesten–McKay moments and the resolvent sum.
    Mckay(commands::mckay::MckayArgs),
    /// Eigenvalues of the walk kernel.
    Spectrum(commands::spectrum::SpectrumArgs),
}

/// Cap rayon's pool at `MEETLAB_THREADS` when set.
fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("MEETLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            invalid(format!(
                "MEETLAB_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| invalid(format!("cannot configure threads: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Exact(args) => commands::exact::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Mckay(args) => commands::mckay::run(args),
        Command::Spectrum(args) => commands::spectrum::run(args),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
