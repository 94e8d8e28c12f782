//! `timelaw` command line: solve, sweep, compare, validate.
//!
//! Exit codes: 0 success, 2 config parse error, 3 validation error,
//! 4 solver non-convergence, 5 I/O failure.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::VariantName;
use run::{run_compare, run_solve, run_sweep, run_validate};

#[derive(Parser)]
#[command(name = "timelaw", version, about = "Optimal rest-to-rest time laws along planar paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Override the reduced-equation variant from the config.
    #[arg(long, global = true, value_parser = parse_variant)]
    variant: Option<VariantName>,
}

fn parse_variant(s: &str) -> Result<VariantName, String> {
    match s {
        "paper" => Ok(VariantName::Paper),
        "expanded" => Ok(VariantName::Expanded),
        other => Err(format!("unknown variant {other:?}; use 'paper' or 'expanded'")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write the trajectory CSV plus JSON report.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve each weight in the config's alpha list; write per-weight
    /// artifacts and a summary CSV sorted by weight.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Line trajectories only: closed form vs shooting vs oracle.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Derivative-table and gradient consistency checks.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { config } => run_solve(config, &cli.out_dir, cli.variant),
        Command::Sweep { config } => run_sweep(config, &cli.out_dir, cli.variant),
        Command::Compare { config } => run_compare(config, &cli.out_dir, cli.variant),
        Command::Validate { config } => run_validate(config, &cli.out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.outcome as u8)
        }
    }
}
