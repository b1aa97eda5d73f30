mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::UsageError;
use crate::output::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "recmart", version, about = "Green functions, harmonic profiles, path measures and Doob transforms of recurrent Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Killed Green function G_{x0}(x, y).
    Green(commands::green::GreenArgs),
    /// Harmonic profile of a boundary point or mixture, with checks.
    Martin(commands::martin::MartinArgs),
    /// Path measures Q^{x0,φ}_x of finite-horizon events.
    Measure(commands::measure::MeasureArgs),
    /// Ensembles of the Doob-transformed chain.
    Simulate(commands::simulate::SimulateArgs),
    /// Potential kernel of the planar walk.
    Potential(commands::potential::PotentialArgs),
    /// Runs the invariant suite and prints a conformance report.
    Verify(commands::verify::VerifyArgs),
}

fn run(cli: Cli) -> anyhow::Result<(Report, Format)> {
    Ok(match cli.command {
        Command::Green(a) => (commands::green::run(&a)?, a.out.emit),
        Command::Martin(a) => (commands::martin::run(&a)?, a.out.emit),
        Command::Measure(a) => (commands::measure::run(&a)?, a.out.emit),
        Command::Simulate(a) => (commands::simulate::run(&a)?, a.out.emit),
        Command::Potential(a) => (commands::potential::run(&a)?, a.out.emit),
        Command::Verify(a) => (commands::verify::run(&a)?, a.out.emit),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, format)) => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = report.write(format, &mut out) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if report.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
