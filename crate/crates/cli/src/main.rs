//! `trailnet` command-line front end.
//!
//! Each subcommand runs one pipeline stage and writes its artifacts into the
//! `--output` directory. Failures print one JSON line on standard error and
//! exit with 1 (I/O or parse), 2 (invalid configuration) or 3 (alphabet limit).

mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;

use crate::config::{Args, RunConfig, ALPHABET_LIMIT_ENV};
use crate::error::CliError;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            return fail(&CliError::config(first.trim_start_matches("error: ")));
        }
    };

    let limit = std::env::var(ALPHABET_LIMIT_ENV).ok();
    let outcome = RunConfig::from_args(args, limit.as_deref()).and_then(|config| commands::run(&config));
    match outcome {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_line());
    ExitCode::from(err.kind.exit_code())
}
