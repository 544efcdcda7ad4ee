//! `zenodark` command line: each subcommand runs one experiment and writes
//! a CSV table or JSON document headed by its resolved configuration.
//!
//! Exit status: 0 on success, 1 on numerical or IO failure, 2 on usage
//! errors (including unparseable paths).

mod args;
mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, OUT_DIR_ENV};
use error::{CliError, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let report = commands::run(&cli.command)?;
    let bytes = output::render(&cli.command, format, &report)?;
    let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let dest = output::destination(
        cli.out.as_deref(),
        env_dir.as_deref(),
        cli.command.name(),
        format,
    );
    output::write(&dest, &bytes)?;
    if !cli.quiet {
        let summary = serde_json::Value::Object(report.summary);
        match &dest {
            output::Destination::Stdout => eprintln!("{}: {summary}", cli.command.name()),
            output::Destination::File(p) => {
                eprintln!("{}: {summary} -> {}", cli.command.name(), p.display())
            }
        }
    }
    Ok(())
}
