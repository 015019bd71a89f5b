mod args;
mod commands;
mod error;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs as usize)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(3);
        }
    };
    let report = cli.report.as_deref();
    let outcome = pool.install(|| match &cli.command {
        Command::Compute(a) => commands::compute(a, report),
        Command::Sweep(a) => commands::sweep(a, report),
        Command::Verify(a) => commands::verify(a, report),
        Command::Minimize(a) => commands::minimize(a, report),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            CliError::exit_code(&e)
        }
    }
}
