use std::panic;
use std::process::ExitCode;

use clap::Parser;

use roadsight_cli::args::Cli;
use roadsight_cli::commands;
use roadsight_cli::failure::EXIT_INTERNAL;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match panic::catch_unwind(|| commands::run(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
