use thiserror::Error;

/// Errors raised by the stabilizer-entropy toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid Hilbert space: {0}")]
    InvalidSpec(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("isotropy violated: {0}")]
    Isotropy(String),
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("phase consistency: {0}")]
    PhaseConsistency(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("bad character: {0}")]
    BadCharacter(String),
    #[error("numerical integrity: {0}")]
    Numerical(String),
    #[error("optimization failed: {0}")]
    Optimization(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Unreadable or malformed input.
    #[error("input error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
