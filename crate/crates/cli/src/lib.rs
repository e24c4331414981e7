//! Command-line front end: argument types, the four subcommands and their
//! on-disk artifacts.

pub mod analysis;
pub mod args;
pub mod btune;
pub mod compare;
pub mod curves;
pub mod error;
pub mod fit;
pub mod grid;
pub mod simulate;
pub mod svg;

pub use args::{Cli, Command};
pub use error::CliError;

/// Run one parsed command on the current rayon pool.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fit(a) => fit::run_fit(a).map(drop),
        Command::Compare(a) => compare::run_compare(a).map(drop),
        Command::Simulate(a) => simulate::run_simulate(a).map(drop),
        Command::Btune(a) => btune::run_btune(a).map(drop),
    }
}

/// Run on a pool of `cli.threads` workers, or the global pool when unset.
pub fn run_with_threads(cli: &Cli) -> Result<(), CliError> {
    match cli.threads {
        None => run(cli),
        Some(0) => Err(CliError::Validation(
            "--threads must be positive".to_string(),
        )),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?
            .install(|| run(cli)),
    }
}
