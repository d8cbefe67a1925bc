mod args;
mod failure;
mod generate;
mod output;
mod recover;
mod sweeps;
mod theory;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use failure::{CliResult, EXIT_OK};

fn dispatch(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Recover(a) => recover::recover(a)?,
        Command::PhaseGamma(a) => sweeps::phase_gamma(a)?,
        Command::PhaseIters(a) => sweeps::phase_iters(a)?,
        Command::PhaseK(a) => sweeps::phase_k(a)?,
        Command::Scaling(a) => sweeps::scaling(a)?,
        Command::Ric(a) => theory::ric(a)?,
        Command::Verify(a) => return theory::verify(a),
        Command::Generate(a) => generate::generate(a)?,
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
