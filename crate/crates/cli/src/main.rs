//! `contactkit verify | invariant | double-equiv`.
//!
//! Exit status: 0 when every check passes, 1 when any check fails or a
//! run-time error occurs, 2 on a configuration error (nothing written).

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig, SEED_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(cli.command.args(), std::env::var(SEED_ENV).ok())?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build()?;
    let report = pool.install(|| match &cli.command {
        Command::Verify(_) => commands::cmd_verify(&cfg),
        Command::Invariant(_) => commands::cmd_invariant(&cfg),
        Command::DoubleEquiv(_) => commands::cmd_double_equiv(&cfg),
    })?;
    println!("{} {}: {}", cli.command.name(), if report.all_pass { "PASS" } else { "FAIL" }, cfg.output.dir.join("report.json").display());
    Ok(report.all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
