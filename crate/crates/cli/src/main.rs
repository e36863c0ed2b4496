mod args;
mod commands;
mod config;
mod error;
mod sweep;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{CliError, EXIT_OK, EXIT_USAGE};

fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let f = cli.format;
    match &cli.command {
        Command::Exponent(a) => commands::exponent(a, f),
        Command::Regime(a) => commands::regime(a, f),
        Command::Finite(a) => commands::finite(a, f),
        Command::Sweep(a) => sweep::run(a, f),
        Command::Verify(a) => commands::verify(a, f),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
