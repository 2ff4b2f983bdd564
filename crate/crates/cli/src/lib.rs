//! Front end for the `emd` binary: synthesis, decomposition, spectra,
//! method comparison, oracle checks and the built-in experiment registry.

pub mod commands;
pub mod experiments;
pub mod overrides;
pub mod report;

use emd_core::EmdError;

pub use experiments::{experiment_ids, run_experiment, EXPERIMENTS};
pub use overrides::Overrides;
pub use report::ExperimentReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("unknown experiment `{0}` (try `emd list`)")]
    UnknownExperiment(String),
    #[error(transparent)]
    Emd(#[from] EmdError),
    #[error("{0}: {1}")]
    Context(String, EmdError),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
}

impl CliError {
    /// 2 for usage and input problems, 1 for anything that failed while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::UnknownExperiment(_) | CliError::Io(..) => 2,
            CliError::Emd(e) | CliError::Context(_, e) => match e {
                EmdError::MalformedCsv { .. }
                | EmdError::InvalidConfig(_)
                | EmdError::InvalidRecipe(_)
                | EmdError::InvalidStep(_)
                | EmdError::NonIntegerSpan { .. }
                | EmdError::InvalidGrid(_) => 2,
                _ => 1,
            },
        }
    }
}

pub(crate) trait WithContext<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> WithContext<T> for Result<T, EmdError> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|e| CliError::Context(what(), e))
    }
}
