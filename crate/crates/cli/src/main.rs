mod commands;
mod config;
mod plot;
mod table;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use commands::InvariantError;
use config::{Cli, ConfigError, RunConfig};

/// 2 for configuration problems, 3 for numerical failures, 4 for violated
/// bounds or invariants.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<InvariantError>().is_some() {
        return 4;
    }
    match err.downcast_ref::<liouville_core::Error>() {
        Some(liouville_core::Error::Bound(_)) => 4,
        Some(
            liouville_core::Error::Domain(_)
            | liouville_core::Error::InvalidGrading(_)
            | liouville_core::Error::ModeCutoff { .. }
            | liouville_core::Error::Shape { .. },
        ) => 2,
        _ => 3,
    }
}

fn kind(code: u8) -> &'static str {
    match code {
        2 => "config",
        4 => "invariant",
        _ => "numerical",
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::from_cli(cli)?;
    let outcome = commands::run(&cfg)?;
    if let Some(path) = &cfg.plot {
        plot::emit_plot(&outcome.panels, path)?;
    }
    let text = table::render(&outcome.report, &cfg)?;
    table::emit(&text, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = exit_code(&err);
            let record = json!({
                "error": kind(code),
                "command": cli.command.name(),
                "message": format!("{err:#}"),
                "exit_code": code,
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}
