//! Command-line front end. The binary is a thin wrapper over [`run_cli`].

pub mod args;
pub mod error;
pub mod output;
pub mod run;

use crate::args::Cli;
use crate::error::CliError;
use crate::output::{emit, render, RunConfig};

pub fn run_cli(cli: Cli) -> Result<(), CliError> {
    let outcome = run::execute(&cli.command)?;
    let out = cli.command.output().clone();
    let config = RunConfig::new(cli.command);
    let text = render(&config, &outcome.report, out.format)?;
    emit(out.out.as_deref(), &text)?;
    match outcome.deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
