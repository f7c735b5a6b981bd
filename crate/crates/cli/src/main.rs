//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence,
//! degeneracy or a refused estimate.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// How a command failed; each maps to one exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    /// The computation ran but produced no usable answer.
    Outcome(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Outcome(_) => 3,
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(e) => eprintln!("usage error: {e:#}"),
                Failure::Data(e) => eprintln!("error: {e:#}"),
                Failure::Outcome(msg) => eprintln!("{msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
