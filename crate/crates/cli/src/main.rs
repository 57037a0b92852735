//! `acyclic`: analysis, simulation, transformation and bound auditing of
//! silent self-stabilizing algorithms on spanning forests.
//!
//! Exit codes: 0 success, 1 verification or audit failure, 2 usage or
//! input error.

mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AnalyzeArgs, AuditArgs, BoundsArgs, RunArgs, TransformArgs, WorstcaseArgs};
use verify::VerifyArgs;

#[derive(Debug, Parser)]
#[command(name = "acyclic", version, about)]
struct Cli {
    /// Directory receiving default output files.
    #[arg(long, global = true, env = "ACYCLIC_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Print the JSON report on standard output instead of the table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify families, build the causality graph and decide the strategy.
    Analyze(AnalyzeArgs),
    /// Execute an algorithm under a daemon and audit the trace.
    Run(RunArgs),
    /// Derive the priority order, build T(A) and re-analyze it.
    Transform(TransformArgs),
    /// Emit a scripted worst-case execution of `te`.
    Worstcase(WorstcaseArgs),
    /// Run a fixed-seed property suite.
    Verify(VerifyArgs),
    /// Evaluate the move and round bounds.
    Bounds(BoundsArgs),
    /// Check a trace CSV against a bounds report.
    Audit(AuditArgs),
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Failure,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Success
        } else {
            Status::Failure
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = output::Output::new(cli.json, cli.out_dir);
    let result = match cli.command {
        Command::Analyze(args) => commands::analyze(args, &out),
        Command::Run(args) => commands::run(args, &out),
        Command::Transform(args) => commands::transform(args, &out),
        Command::Worstcase(args) => commands::worstcase(args, &out),
        Command::Verify(args) => verify::verify(args, &out),
        Command::Bounds(args) => commands::bounds(args, &out),
        Command::Audit(args) => commands::audit(args, &out),
    };
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Failure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
