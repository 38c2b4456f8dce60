//! Pipeline driver behind the `paracorp` binary.
//!
//! Each stage reads the previous stage's store under the work directory and
//! writes its own: line-delimited records plus a `manifest.json` carrying the
//! configuration snapshot and its hash.

pub mod args;
pub mod config;
pub mod stages;
pub mod store;

use std::process::ExitCode;

pub use args::{Cli, Command};
pub use config::{LoadedConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or configuration (exit status 2).
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

macro_rules! failed_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Failed(e.to_string())
            }
        })*
    };
}

failed_from!(
    paracorp::corpus_prep::PrepError,
    paracorp::backtranslate::TranslateError,
    paracorp::dataset::DatasetError,
    paracorp::annotation::AnnotationError,
    paracorp::evaluation::EvalError,
    std::io::Error
);

/// Parse `args` and run; returns the process exit status.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match stages::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
