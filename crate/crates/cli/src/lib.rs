//! The `statcp` command line: runs the built-in models and reports results
//! as JSON, with optional CSV tables and CDF plot data.
//!
//! Exit codes: 0 completed, 1 unsatisfiable (or a failed validation),
//! 2 search limit reached, 64 usage error, 74 I/O error.

mod args;
mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

pub use args::{Cli, Command, Format, Mode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunStats {
    pub nodes: u64,
    pub failures: u64,
    pub wall_ms: f64,
}

/// Machine-readable summary of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub problem: &'static str,
    pub mode: Mode,
    pub alpha: f64,
    pub params: Value,
    pub result: Value,
    pub stats: RunStats,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Completed,
    Unsatisfiable,
    LimitReached,
}

impl Outcome {
    fn code(self) -> i32 {
        match self {
            Outcome::Completed => EXIT_OK,
            Outcome::Unsatisfiable => EXIT_UNSAT,
            Outcome::LimitReached => EXIT_LIMIT,
        }
    }
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Io(String),
}

impl From<statcp::solver::ModelError> for CliError {
    fn from(e: statcp::solver::ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<statcp::stats::StatsError> for CliError {
    fn from(e: statcp::stats::StatsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// What a command produced, before anything is written.
pub(crate) struct Run {
    pub report: RunReport,
    /// Main table for `--format csv`.
    pub csv: Option<String>,
    pub plot_csv: Option<String>,
    pub outcome: Outcome,
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, mut run: Run, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let common = cli.command.common();
    if let Some(path) = &common.plot {
        let csv = run
            .plot_csv
            .take()
            .ok_or_else(|| CliError::Usage("--plot is not available here".into()))?;
        write_file(path, &csv)?;
        run.report.artifacts.push(path.display().to_string());
    }
    let table = match common.format {
        Format::Json => None,
        Format::Csv => Some(
            run.csv
                .take()
                .ok_or_else(|| CliError::Usage("no CSV table for this run".into()))?,
        ),
    };
    if let (Some(path), Some(_)) = (&common.out, &table) {
        run.report.artifacts.push(path.display().to_string());
    }
    let json = serde_json::to_string_pretty(&run.report).expect("report serializes") + "\n";
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match (table, &common.out) {
        (None, None) => stdout.write_all(json.as_bytes()).map_err(io)?,
        (None, Some(path)) => write_file(path, &json)?,
        (Some(csv), None) => stdout.write_all(csv.as_bytes()).map_err(io)?,
        (Some(csv), Some(path)) => {
            write_file(path, &csv)?;
            stdout.write_all(json.as_bytes()).map_err(io)?;
        }
    }
    Ok(run.outcome)
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = commands::run(&cli).and_then(|run| emit(&cli, run, stdout));
    match result {
        Ok(outcome) => outcome.code(),
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}
