use thiserror::Error;

/// Errors produced by the effective-Hamiltonian routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("small divisor |Q·k| = {divisor:e} below floor at k = {k:?}")]
    SmallDivisor { k: Vec<i64>, divisor: f64 },

    #[error("degenerate Diophantine vector: Q·k = 0 at k = {0:?}")]
    Degenerate(Vec<i64>),

    #[error("could not bracket root: {0}")]
    Bracket(String),

    #[error("numeric blowup: {0}")]
    Blowup(String),

    #[error("monodromy overflow at lambda = {lambda}; try a less negative lambda range")]
    Overflow { lambda: f64 },

    #[error("spectral range error: {0}")]
    SpectralRange(String),

    #[error("invalid descriptor: {0}")]
    Descriptor(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
