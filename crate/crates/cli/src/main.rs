mod args;
mod commands;
mod config;

use std::ffi::OsString;
use std::fmt;
use std::process::ExitCode;

use clap::Parser;
use pf_core::PfError;

use crate::args::Cli;

/// Exit statuses: 0 success, 1 usage or configuration, 2 numerical failure,
/// 3 regime violation.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    Core(PfError),
    /// the run finished but its checks did not pass
    Failed(String),
    /// output was written but the run left its regime
    Regime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Failed(_) => 2,
            CliError::Regime(_) => 3,
            CliError::Core(e) => match e {
                PfError::InvalidConfiguration(_)
                | PfError::InvalidArgument(_)
                | PfError::UnsupportedOrder(_)
                | PfError::PhotonicNotApplicable
                | PfError::Parse(_) => 1,
                PfError::NumericalFailure { .. }
                | PfError::LevelNotFound { .. }
                | PfError::UndefinedResidual => 2,
                PfError::Domain { .. } | PfError::Superluminal { .. } | PfError::OutOfRegime { .. } => 3,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) | CliError::Regime(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<PfError> for CliError {
    fn from(e: PfError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn parse_args(raw: Vec<OsString>) -> Result<Cli, clap::Error> {
    let Some(path) = config::config_path(&raw) else {
        return Cli::try_parse_from(&raw);
    };
    let flags = config::load_config(&path)
        .map_err(|m| clap::Error::raw(clap::error::ErrorKind::Io, format!("{m}\n")))?;
    Cli::try_parse_from(config::merge(&raw, flags))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match parse_args(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
