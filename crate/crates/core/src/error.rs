use thiserror::Error;

/// Failures surfaced by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An internal invariant was violated. This always signals a bug upstream.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// A regime query matched none of the theorem branches.
    #[error("unclassified regime: {0}")]
    Classification(String),

    /// The request is well-formed but exceeds a computational bound.
    #[error("refused: {what} = {requested} exceeds the supported bound {bound}")]
    TooLarge {
        what: &'static str,
        requested: usize,
        bound: usize,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }

    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Consistency(_) | Error::Classification(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
