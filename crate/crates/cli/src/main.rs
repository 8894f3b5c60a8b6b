//! `critdisc`: entropy-based criticality analysis of evolving graphs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod analyze;
mod config;
mod error;
mod inputs;
mod output;
mod simulate;
mod svg;
mod sweep;
mod train;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "critdisc", version, about)]
struct Cli {
    /// Repeat for more log output (info, debug, trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy trace, transition detection, surprise and topology reports.
    Analyze(analyze::AnalyzeArgs),
    /// Generate a synthetic growth corpus.
    Simulate(simulate::SimulateArgs),
    /// Train a REINFORCE edge-addition policy on synthetic growth.
    RlTrain(train::TrainArgs),
    /// Surprising-edge fraction across a grid of thresholds.
    Sweep(sweep::SweepArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", CliError::Usage(first.to_string()).line());
            return ExitCode::from(1);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = match &cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::RlTrain(a) => train::run(a),
        Command::Sweep(a) => sweep::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
