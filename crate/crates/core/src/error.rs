use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("matrix is not Hermitian: {0}")]
    Symmetry(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("vector is not unit norm (norm = {0})")]
    Normalization(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("simulation cap exceeded: {0}")]
    SimulationCap(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by the computation itself.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension { .. }
                | Error::Symmetry(_)
                | Error::Domain(_)
                | Error::Normalization(_)
                | Error::Unsupported(_)
                | Error::GroupMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
