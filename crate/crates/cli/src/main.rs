mod analytic;
mod output;
mod parse;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "opengossip", version, about = "Moment dynamics of gossip averaging in open systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form moments, fixed points, spectra and bounds.
    #[command(subcommand)]
    Analytic(analytic::AnalyticCmd),
    /// Monte Carlo realizations and ensembles.
    #[command(subcommand)]
    Simulate(simulate::SimulateCmd),
    /// Run an ensemble and test it against the matching recursion.
    #[command(subcommand)]
    Compare(simulate::CompareCmd),
}

/// Exit codes: 0 success, 1 a verdict failed, 2 bad input or runtime error.
fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analytic(cmd) => analytic::run(cmd).map(|()| true),
        Command::Simulate(cmd) => simulate::run_simulate(cmd).map(|()| true),
        Command::Compare(cmd) => simulate::run_compare(cmd),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("comparison failed: at least one verdict did not pass");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
