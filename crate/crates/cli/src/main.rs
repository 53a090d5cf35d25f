mod args;
mod experiment;
mod explain;
mod inputs;
mod validate;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Errors surfaced to the user; each maps to an exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration.
    Usage(String),
    Core(mcgame::Error),
    Io(std::io::Error),
    /// A checked invariant did not hold.
    Invariant(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CliError::Invariant(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(mcgame::Error::Internal(_)) | CliError::Invariant(_) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Invariant(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl From<mcgame::Error> for CliError {
    fn from(e: mcgame::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(mcgame::Error::Json(e))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Explain(a) => explain::cmd_explain(a),
        Command::Exact(a) => explain::cmd_exact(a),
        Command::Experiment(a) => experiment::cmd_experiment(a),
        Command::Validate(a) => validate::cmd_validate(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
