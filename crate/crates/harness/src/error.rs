use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown experiment `{0}` (see `onet list`)")]
    UnknownExperiment(String),

    #[error("parameter `{key}`: {message}")]
    Param { key: String, message: String },

    #[error(transparent)]
    Core(#[from] onet_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn param(key: &str, message: impl Into<String>) -> Self {
        HarnessError::Param {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Config problems map to exit code 2, everything else to 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config { .. }
            | HarnessError::UnknownExperiment(_)
            | HarnessError::Param { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
