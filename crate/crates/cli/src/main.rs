//! `pointdata`: validate, merge, fit, summarize and derive point-data tables.
//!
//! Exit status is 0 when clean, 1 on a domain failure (Block findings, a
//! failed fit) and 2 on usage, I/O or parse errors.

mod commands;
mod config;
mod error;
mod input;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{derive::DeriveArgs, fit::FitArgs, merge::MergeArgs, stats::StatsArgs};
use config::{CommonArgs, RunConfig};
use error::{CliError, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "pointdata",
    version,
    about = "Point-data propagation measurement tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check campaigns and print findings as JSON lines.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Campaign stems or their `.pointdata`/`.meta` files.
        inputs: Vec<PathBuf>,
    },
    /// Pool campaigns into one table with a compatibility report.
    Merge {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: MergeArgs,
        /// Campaign stems or their `.pointdata`/`.meta` files.
        inputs: Vec<PathBuf>,
    },
    /// Fit a path-loss model per LOS/NLOS split.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: FitArgs,
        /// Campaign stems or their `.pointdata`/`.meta` files.
        inputs: Vec<PathBuf>,
    },
    /// Lognormal statistics and empirical CDF of one column.
    Stats {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: StatsArgs,
        /// Campaign stems or their `.pointdata`/`.meta` files.
        inputs: Vec<PathBuf>,
    },
    /// Derive point-data rows from raw directional profiles.
    Derive {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: DeriveArgs,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Validate { common, inputs } => {
            commands::validate::run(&RunConfig::resolve(&common, &inputs)?)
        }
        Command::Merge {
            common,
            args,
            inputs,
        } => commands::merge::run(&RunConfig::resolve(&common, &inputs)?, &args),
        Command::Fit {
            common,
            args,
            inputs,
        } => commands::fit::run(&RunConfig::resolve(&common, &inputs)?, &args),
        Command::Stats {
            common,
            args,
            inputs,
        } => commands::stats::run(&RunConfig::resolve(&common, &inputs)?, &args),
        Command::Derive { common, args } => {
            let cfg = RunConfig::resolve(&common, std::slice::from_ref(&args.meta))?;
            commands::derive::run(&cfg, &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            report::error(&e);
            ExitCode::from(e.exit_code())
        }
    }
}
