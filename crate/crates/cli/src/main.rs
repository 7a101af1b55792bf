use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gausscq_cli::config::{CommonArgs, UsageError};
use gausscq_cli::{examples, figures, verify};

/// Covariance-level toolkit for Gaussian classical-quantum channels:
/// capacity curves, dilation property checks, and the worked channel
/// families.
#[derive(Parser)]
#[command(name = "gausscq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the capacity-vs-r curves (C, C_ea, ratio) as CSV or JSON
    Figures(CommonArgs),
    /// Run the seeded property suites and report pass/fail per suite
    Verify {
        #[command(flatten)]
        args: CommonArgs,
        /// Route a below-vacuum covariance through the state constructor to
        /// demonstrate error surfacing; forces a failing report
        #[arg(long)]
        inject_fault: bool,
    },
    /// Two-quadrature family: closed-form capacity vs optimizer, and the
    /// squeezed-ensemble ladder
    Example1(CommonArgs),
    /// One-quadrature family: C < C_ea, the squeezing sweep, and the gaps
    Example2(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Figures(args) => args.resolve().and_then(|cfg| figures::run(&cfg)),
        Command::Verify { args, inject_fault } => args
            .resolve()
            .and_then(|cfg| verify::run(&cfg, *inject_fault)),
        Command::Example1(args) => args.resolve().and_then(|cfg| examples::example1(&cfg)),
        Command::Example2(args) => args.resolve().and_then(|cfg| examples::example2(&cfg)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
