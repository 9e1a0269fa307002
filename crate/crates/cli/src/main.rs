mod args;
mod commands;
mod csvio;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracdim: {}: {e}", e.kind());
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    match (cli.from_manifest, cli.command) {
        (Some(_), Some(cmd)) => Err(CliError::Config(format!(
            "--from-manifest cannot be combined with the `{}` subcommand",
            cmd.name()
        ))),
        (Some(path), None) => {
            let manifest = RunManifest::read(&path)?;
            commands::run(&manifest.body.params, Some(manifest.timestamp_unix))
        }
        (None, Some(cmd)) => commands::run(&cmd, None),
        (None, None) => Err(CliError::Config("no subcommand given (try --help)".into())),
    }
}
