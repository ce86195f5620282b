//! `cavity-gbs` command-line front end.
//!
//! Exit codes: 0 success, 1 output write failure, 2 bad input or config,
//! 3 truncation leak, 4 verification failure.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command, cli.global) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
