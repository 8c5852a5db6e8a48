use thiserror::Error;

/// Errors raised by the construction and verification kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (zero divisor,
    /// coincident points, even chain period, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("arity error: expected {expected} parameters, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A family member collapsed (identically vanishing Wronskian).
    #[error("degenerate family: {0}")]
    Degenerate(String),

    /// The function is not of the form sum m_i/(z - z_i) + nu - mu z with integer m_i.
    #[error("function outside the integer-residue class: {0}")]
    NotInClass(String),

    /// Working precision is insufficient for the requested computation.
    #[error("precision error: {0}")]
    Precision(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("chain construction failed: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
