use superrep_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        CliError::Config { key: key.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Infeasible(_) | CliError::Io(_) => 1,
        }
    }
}

/// Library errors come from parameter values, so they are reported against
/// the configuration key that carries them.
impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let key = match &e {
            CoreError::OddCopies { name, .. } | CoreError::InvalidParameter { name, .. } => name.to_lowercase(),
            CoreError::TooFewOutputs { .. } | CoreError::DenseLimit { .. } => "m".to_string(),
            CoreError::NotUnitary { .. } => "gate".to_string(),
            CoreError::Infeasible(reason) => return CliError::Infeasible(reason.clone()),
        };
        CliError::Config { key, message: e.to_string() }
    }
}
