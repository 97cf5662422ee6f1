use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition of a classifier does not hold for the given input.
    #[error("out of scope: {0}")]
    OutOfScope(String),

    /// The input is degenerate (singular exponent matrix, zero parameter).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An internal cross-check failed; indicates inconsistent input data
    /// (e.g. a point that is not an equilibrium) or a reachable-in-theory-only
    /// branch of a case analysis.
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("no return to the section: {0}")]
    NoReturn(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}
