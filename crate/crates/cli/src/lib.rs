//! Command-line front end: `subsonic <command> --config <path> [--override key=value ...]`.
//!
//! Every run writes a summary JSON (also on failure). Exit status is 0 for
//! Euler-consistent or otherwise completed runs, 2 when only the truncated
//! problem is known to be solved, and 1 on errors.

pub mod commands;
pub mod config;
pub mod io;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{run, Command, RunSummary};
use crate::config::{load_config, summary_path_hint};
use crate::io::write_text;

#[derive(Debug, Parser)]
#[command(
    name = "subsonic",
    version,
    about = "Steady subsonic flow through infinitely long 2-D nozzles"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Solve the flow and write the field CSV and summary.
    Solve(RunArgs),
    /// Compute the upstream and downstream asymptotic states only.
    Farfield(RunArgs),
    /// Bracket the critical mass flux.
    Critical(RunArgs),
    /// Recompute the diagnostics of an existing field CSV.
    Verify(RunArgs),
    /// Tabulate the critical gas quantities over a grid of Bernoulli constants.
    Gastable(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Replace a config value, e.g. `solver.n_xi=201` or `m=0.7`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl CliCommand {
    fn split(self) -> (Command, RunArgs) {
        match self {
            CliCommand::Solve(a) => (Command::Solve, a),
            CliCommand::Farfield(a) => (Command::Farfield, a),
            CliCommand::Critical(a) => (Command::Critical, a),
            CliCommand::Verify(a) => (Command::Verify, a),
            CliCommand::Gastable(a) => (Command::Gastable, a),
        }
    }
}

/// Parse arguments, run, write the summary; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (command, args) = cli.command.split();
    let (summary, path) = match load_config(&args.config, &args.overrides) {
        Ok(cfg) => (run(command, &cfg), cfg.outputs.summary_json_path.clone()),
        Err(e) => {
            let mut s = RunSummary::new(command);
            s.fail(format!("config: {e}"));
            (s, summary_path_hint(&args.config, &args.overrides))
        }
    };
    report(&summary);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    if let Err(e) = write_text(&path, &json) {
        eprintln!("error: {e:#}");
        return 1;
    }
    summary.exit_code
}

fn report(s: &RunSummary) {
    if let Some(f) = &s.failure {
        eprintln!("error: {f}");
    }
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    for v in &s.violations {
        eprintln!("violation: {v}");
    }
    if let Some(c) = s.critical.as_ref().and_then(|c| c.bracket) {
        println!("critical mass flux in [{}, {}]", c.0, c.1);
    }
    println!("status: {:?} (exit {})", s.status, s.exit_code);
}
