mod commands;
mod config;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use config::{Cli, Command, ExperimentKind, Format, RunArgs, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("optimization did not converge: {0}")]
    NotConverged(String),
    #[error(transparent)]
    Core(#[from] kcbs_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(kcbs_core::Error::InvalidParameter(_)) => 2,
            CliError::Io(_) => 3,
            CliError::NotConverged(_) => 4,
            CliError::Core(_) => 1,
        }
    }
}

fn emit(out: &commands::Outcome, format: Format, output: Option<&PathBuf>) -> Result<(), CliError> {
    let text = render::render(out, format);
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (out, format, output) = match cli.command {
        Command::Bounds { json } => {
            let format = if json { Format::Json } else { Format::Text };
            (commands::bounds(), format, None)
        }
        Command::Run(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let (format, output) = (cfg.format, cfg.output.clone());
            (commands::run(cfg)?, format, output)
        }
        Command::Tables(args) => {
            let out = commands::tables(&args)?;
            (out, args.format, args.output)
        }
        Command::PhotonicVerify(a) => {
            let args = RunArgs {
                experiment: Some(ExperimentKind::PhotonicVerify),
                delay_ns: a.delay_ns,
                format: Some(a.format.unwrap_or(Format::Text)),
                output: a.output,
                ..RunArgs::default()
            };
            let cfg = RunConfig::resolve(&args)?;
            let (format, output) = (cfg.format, cfg.output.clone());
            (commands::run(cfg)?, format, output)
        }
        Command::Optimize(a) => {
            let args = RunArgs {
                experiment: Some(ExperimentKind::Optimize),
                target: a.target,
                seed: a.seed,
                restarts: a.restarts,
                evaluations: a.evaluations,
                format: Some(a.format.unwrap_or(Format::Text)),
                output: a.output,
                ..RunArgs::default()
            };
            let cfg = RunConfig::resolve(&args)?;
            let (format, output) = (cfg.format, cfg.output.clone());
            (commands::run(cfg)?, format, output)
        }
    };
    emit(&out, format, output.as_ref())?;
    match out.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kcbs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
