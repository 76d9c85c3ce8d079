use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric precondition was violated (`x <= 0`, `|z| >= 1`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid precision context: {0}")]
    Context(String),

    /// A series did not reach its tail bound within `max_terms`.
    #[error("truncation budget exceeded: {what} needed more than {limit} terms")]
    TruncationBudget { what: String, limit: usize },

    /// Combinatorial enumeration exceeded the configured budget.
    #[error("combinatorial budget exceeded: {0}")]
    CombinatorialBudget(String),

    #[error("quadrature did not converge after {levels} levels (last difference {last_diff})")]
    QuadratureNotConverged { levels: u32, last_diff: String },

    #[error("jet degree {have} is too small, need {need}")]
    JetDegree { have: usize, need: usize },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn out_of_range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }

    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_precondition(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::OutOfRange(_) | Error::Context(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
