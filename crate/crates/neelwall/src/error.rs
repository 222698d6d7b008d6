use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid anisotropy strength: {0}")]
    Anisotropy(String),

    #[error("boundary phase {phase} is not a well phase for h = {h} (offset {offset:.3e})")]
    WellPhase { phase: f64, h: f64, offset: f64 },

    #[error("inadmissible winding number: {0}")]
    Degree(String),

    #[error("incompatible profiles: {0}")]
    Incompatible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
