use thiserror::Error;

use crate::sequences::FiniteSeq;

/// Errors raised by the library. Search failures are always reported as
/// [`Error::BudgetExceeded`], never as a guessed answer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("containment violation: image of {input} under the factor at {index} is {image}, which does not extend {index}")]
    ContainmentViolation {
        index: FiniteSeq,
        input: FiniteSeq,
        image: FiniteSeq,
    },

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>) -> Self {
        Error::BudgetExceeded(what.into())
    }

    pub(crate) fn domain(what: impl Into<String>) -> Self {
        Error::DomainMismatch(what.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
