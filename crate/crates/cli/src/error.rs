use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] cvtele::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 2 for configuration and precondition errors, 3 for failed checks.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) | CliError::Core(cvtele::Error::QuadratureNotConverged(_)) => {
                ExitCode::from(3)
            }
            _ => ExitCode::from(2),
        }
    }

    /// The reader closed the output early, as with `cvtele ... | head`.
    pub fn is_broken_pipe(&self) -> bool {
        let kind = match self {
            CliError::Io(e) => Some(e.kind()),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e.kind()),
                _ => None,
            },
            CliError::Json(e) => e.io_error_kind(),
            _ => None,
        };
        kind == Some(std::io::ErrorKind::BrokenPipe)
    }

    pub fn kind(&self) -> String {
        match self {
            CliError::Config(_) => "Config".into(),
            CliError::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric())
                    .next()
                    .unwrap_or("Core")
                    .to_string()
            }
            CliError::Io(_) => "Io".into(),
            CliError::Csv(_) => "Csv".into(),
            CliError::Json(_) => "Json".into(),
            CliError::Validation(_) => "Validation".into(),
        }
    }

    /// Structured form printed by the report commands.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
            },
            "pass": false,
        });
        if let CliError::Core(cvtele::Error::CutoffTooSmall { dim, required, .. }) = self {
            obj["error"]["dim"] = (*dim).into();
            obj["error"]["required"] = (*required).into();
        }
        obj
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
