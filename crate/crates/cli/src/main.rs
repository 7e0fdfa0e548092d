use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use qes_cli::args::{Cli, Command};
use qes_cli::commands::{self, CliError, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR),
            };
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Asymptotic(a) => commands::asymptotic(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
        Command::Verify(a) => commands::verify(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
