use std::fmt;
use std::path::Path;

use serde::Serialize;

/// Failures of a CLI run, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or incomplete configuration (exit 2).
    Config { message: String, pointer: Option<String> },
    /// A computation rejected its input or failed numerically (exit 3 or 4).
    Core {
        error: gthresh_core::Error,
        pointer: Option<String>,
    },
    /// Reading or writing a file failed (exit 5).
    Io { message: String, path: String },
    /// The oracle suites ran but at least one failed (exit 6).
    VerifyFailed { failed: Vec<String> },
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    exit_code: i32,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pointer: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<&'a str>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    pub fn config(message: impl Into<String>, pointer: Option<String>) -> Self {
        CliError::Config {
            message: message.into(),
            pointer,
        }
    }

    pub fn core_at(error: gthresh_core::Error, pointer: &str) -> Self {
        CliError::Core {
            error,
            pointer: Some(pointer.into()),
        }
    }

    pub fn io(error: std::io::Error, path: &Path) -> Self {
        CliError::Io {
            message: error.to_string(),
            path: path.display().to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Core { error, .. } => match error {
                gthresh_core::Error::Quadrature { .. } | gthresh_core::Error::Convergence { .. } => 4,
                _ => 3,
            },
            CliError::Io { .. } => 5,
            CliError::VerifyFailed { .. } => 6,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Core { error, .. } => error.kind(),
            CliError::Io { .. } => "io",
            CliError::VerifyFailed { .. } => "verify_failed",
        }
    }

    /// The machine-readable error object written to stderr.
    pub fn to_json(&self) -> String {
        let (pointer, path) = match self {
            CliError::Config { pointer, .. } | CliError::Core { pointer, .. } => (pointer.as_deref(), None),
            CliError::Io { path, .. } => (None, Some(path.as_str())),
            CliError::VerifyFailed { .. } => (None, None),
        };
        let body = Envelope {
            error: ErrorBody {
                kind: self.kind(),
                exit_code: self.exit_code(),
                message: self.to_string(),
                pointer,
                path,
            },
        };
        serde_json::to_string(&body).expect("error body serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { message, .. } => write!(f, "{message}"),
            CliError::Core { error, .. } => write!(f, "{error}"),
            CliError::Io { message, path } => write!(f, "{path}: {message}"),
            CliError::VerifyFailed { failed } => write!(f, "oracle suites failed: {}", failed.join(", ")),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gthresh_core::Error> for CliError {
    fn from(error: gthresh_core::Error) -> Self {
        CliError::Core { error, pointer: None }
    }
}
