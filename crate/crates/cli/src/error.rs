use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment '{name}'; available: {available}")]
    UnknownExperiment { name: String, available: String },
    #[error("invalid parameters for '{experiment}': {details}")]
    InvalidParams { experiment: String, offending: Vec<String>, details: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("experiment '{experiment}' failed: {source}")]
    Experiment {
        experiment: String,
        #[source]
        source: skewlab::Error,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// All checks passed.
pub const EXIT_PASS: i32 = 0;
/// At least one check failed, or the experiment could not complete.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Usage or configuration error.
pub const EXIT_USAGE: i32 = 2;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownExperiment { .. } | Self::InvalidParams { .. } | Self::Config(_) => EXIT_USAGE,
            Self::Experiment { source, .. } => match source {
                skewlab::Error::InvalidInput(_) => EXIT_USAGE,
                _ => EXIT_CHECK_FAILED,
            },
            Self::Io { .. } => EXIT_CHECK_FAILED,
        }
    }
}
