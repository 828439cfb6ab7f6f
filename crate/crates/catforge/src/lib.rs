//! Command-line front end for `catforge-core`: point fidelities, figure
//! sweeps, Wigner grids and cross-back-end validation, with CSV/JSON output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::process::ExitCode;

pub use cli::{Cli, Command};

/// Failure with the process exit code it maps to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const USAGE: u8 = 2;
    pub const VALIDATION: u8 = 1;

    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: Self::VALIDATION,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<catforge_core::Error> for CliError {
    fn from(e: catforge_core::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "CATFORGE_THREADS";

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::usage(format!(
                "{THREADS_VAR} must be a positive integer, got '{v}'"
            ))
        })?;
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let pool = thread_pool()?;
    pool.install(|| match cli.command {
        Command::Fidelity(a) => commands::fidelity(a),
        Command::Figure(a) => commands::figure(a),
        Command::Wigner(a) => commands::wigner(a),
        Command::Validate(a) => commands::validate(a),
    })
}

/// Runs and reports: one diagnostic line on stderr for failures.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
