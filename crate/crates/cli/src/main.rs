use std::process::ExitCode;

use clap::Parser;
use jointspec_cli::args::Cli;

fn main() -> ExitCode {
    match jointspec_cli::run_cli(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
