use angelesco_lab::commands::{cmd_constants, cmd_nnrr};
use angelesco_lab::config::RunConfig;
use angelesco_lab::verify::cmd_verify;
use angelesco_lab::{Cli, Command};
use clap::Parser;
use std::process::ExitCode;

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let setup = RunConfig::from_args(&cli.run)?.validate()?;
    match &cli.command {
        Command::Constants => cmd_constants(&setup).map(|_| true),
        Command::Nnrr => cmd_nnrr(&setup).map(|_| true),
        Command::Verify { suite } => cmd_verify(&setup, *suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
