//! Command-line front end: `analyze` drives the transcript pipeline end to
//! end, `evaluate` compares cohort scores against PHQ-8 reference data, and
//! `cache record`/`cache verify` manage the remote engine's replay cache.
//!
//! Exit codes: 0 success, 2 input parse/configuration failure, 3 engine
//! failure (including replay-cache misses), 4 no participant overlap in
//! `evaluate`, 1 output I/O failure.

mod analyze;
mod cache_cmd;
mod config;
mod evaluate;
mod report;
mod svg;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "moodmetric", version, about = "Depression-severity scoring from timed interview transcripts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)] // parsed once, at startup
enum Command {
    /// Analyze one or more transcripts and write per-participant reports.
    Analyze(analyze::AnalyzeArgs),
    /// Compare algorithm scores with a PHQ-8 reference file.
    Evaluate(evaluate::EvaluateArgs),
    /// Manage the remote engine's record/replay cache.
    Cache(cache_cmd::CacheCmd),
}

/// Failure category, carrying the exit code the process reports.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid inputs and configuration.
    Parse(String),
    /// Sentiment engine failure: transport, malformed reply, cache miss,
    /// or an unusable cache.
    Engine(String),
    /// No participant present in both evaluate inputs.
    NoOverlap,
    /// Output artifacts could not be written.
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Engine(_) => 3,
            CliError::NoOverlap => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Engine(msg) => write!(f, "engine: {msg}"),
            CliError::NoOverlap => write!(f, "no participant appears in both inputs"),
            CliError::Output(msg) => write!(f, "output: {msg}"),
        }
    }
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze(args) => analyze::run(&args),
        Command::Evaluate(args) => evaluate::run(&args),
        Command::Cache(cmd) => cache_cmd::run(&cmd),
    };
    std::process::exit(code);
}
