use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: unsupported image format: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },
    #[error("image has zero width or height")]
    ZeroDimension,
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("singular distortion: rational denominator {0:e} is too close to zero")]
    SingularDistortion(f64),
    #[error("point is at or behind the camera plane (depth {0:e})")]
    BehindCamera(f64),
    #[error("angle {0} rad outside the open interval (0, pi)")]
    Domain(f64),
    #[error("degenerate template: zero norm")]
    DegenerateTemplate,
    #[error("template {tw}x{th} is larger than the search image {sw}x{sh}")]
    TemplateTooLarge {
        tw: usize,
        th: usize,
        sw: usize,
        sh: usize,
    },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("non-finite residual at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("normal equations stayed singular up to damping {0:e}")]
    Singular(f64),
    #[error("under-determined problem: {0}")]
    UnderDetermined(String),
    #[error("rank-deficient point configuration")]
    RankDeficient,
    #[error("camera {0} sees no particles")]
    EmptyView(usize),
}

impl Error {
    /// I/O failure tagged with the path involved.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) | Error::Domain(_) => 2,
            Error::Io { .. }
            | Error::UnsupportedFormat { .. }
            | Error::ZeroDimension
            | Error::InvalidImage(_) => 3,
            Error::UnderDetermined(_) | Error::EmptyView(_) => 5,
            _ => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
