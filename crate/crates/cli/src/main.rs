mod analyze;
mod args;
mod design;
mod failure;
mod output;
mod table;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Design(a) => design::run(a, &cli.global),
        Command::Analyze(a) => analyze::run(a, &cli.global),
        Command::Table(a) => table::run(a, &cli.global),
        Command::Verify(a) => verify::run(a, &cli.global),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}
