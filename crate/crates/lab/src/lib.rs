//! Command-line drivers: configuration, the recurrence-table cache and the
//! verification suites behind `angelesco-lab`.

pub mod cache;
pub mod commands;
pub mod config;
pub mod verify;

use clap::{Parser, Subcommand};
use config::RunArgs;
use verify::Suite;

#[derive(Parser, Debug)]
#[command(name = "angelesco-lab", version, about = "Experiments on two-interval Angelesco systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the spectral curve at `--c` and write its constants as JSON.
    Constants,
    /// Recurrence table up to `--nmax` as CSV, with error streams along `--ray`.
    Nnrr,
    /// Run a verification suite and write a JSON verdict.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}
