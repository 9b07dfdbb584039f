use std::process::ExitCode;

use clap::Parser;
use weighted_iso_cli::Cli;

fn main() -> ExitCode {
    ExitCode::from(Cli::parse().execute())
}
