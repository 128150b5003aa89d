use thiserror::Error;

/// Errors produced by the measurement pipeline.
///
/// Degenerate inputs are always reported through one of these variants; no
/// public operation returns a NaN or infinite value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("degenerate magnification: {0}")]
    DegenerateMagnification(String),

    #[error("degenerate observation: {0}")]
    DegenerateObservation(String),

    #[error("zero-width sensor image")]
    ZeroWidth,

    #[error("configuration forms a real image, not a virtual one: {0}")]
    NotVirtual(String),

    #[error("declared {declared} lens contradicts estimated focal length {focal_length} cm")]
    InconsistentKind {
        declared: crate::optics::LensKind,
        focal_length: f64,
    },

    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("too many failed Monte Carlo trials: {failed} of {trials} (limit 1%)")]
    TooManyFailures { failed: usize, trials: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// True for errors caused by a degenerate computation rather than bad data.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateGeometry(_)
                | Error::DegenerateMagnification(_)
                | Error::DegenerateObservation(_)
                | Error::ZeroWidth
                | Error::NotVirtual(_)
                | Error::InconsistentKind { .. }
                | Error::TooManyFailures { .. }
        )
    }
}

/// A session-file syntax or validation error. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

impl ParseError {
    pub fn new(line: usize, reason: impl Into<String>) -> Self {
        ParseError {
            line,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
