//! Crate-wide error type and the exit codes the CLI derives from it.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or structural argument was outside its documented domain.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// A run configuration failed validation or could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    /// Two sequences or tables that must agree in shape did not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A map layout was malformed or inconsistent.
    #[error("bad map geometry: {0}")]
    Geometry(String),

    /// `step` was called on an episode that already ended.
    #[error("episode already finished")]
    EpisodeOver,

    /// The transition model has no experience at the requested state.
    #[error("state not covered by the model")]
    UnknownState,

    /// An artifact does not fit the context it was loaded into.
    #[error("incompatible artifact: {0}")]
    Incompatible(String),

    /// An artifact was written by an unsupported format revision.
    #[error("unsupported artifact version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    /// A statistic was requested from too small a sample.
    #[error("not enough data: {0}")]
    InsufficientData(String),

    /// Reading or writing a file failed.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file existed but its contents could not be decoded.
    #[error("cannot parse {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    /// A condition the library guarantees internally was violated.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for this error: 1 for usage and configuration
    /// problems, 2 for I/O failures, 3 for internal invariant violations.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 2,
            Error::Internal(_) => 3,
            _ => 1,
        }
    }

    /// Wrap an I/O failure with the path it concerned.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_partition_by_category() {
        assert_eq!(Error::Param("x".into()).exit_code(), 1);
        assert_eq!(Error::Config("x".into()).exit_code(), 1);
        assert_eq!(Error::EpisodeOver.exit_code(), 1);
        let io = Error::io("/nope", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert_eq!(io.exit_code(), 2);
        assert_eq!(Error::Internal("x".into()).exit_code(), 3);
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = Error::io("/tmp/missing.json", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert!(err.to_string().contains("/tmp/missing.json"));
    }
}
