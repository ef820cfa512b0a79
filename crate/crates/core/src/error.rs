//! Crate-wide error type.

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates an invariant.
    #[error("config error: {0}")]
    Config(String),

    /// A vector or matrix dimension does not match.
    #[error("shape error: {context}: expected {expected}, got {got}")]
    Shape {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A computation produced or encountered a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The requested operation is not defined for this noise family.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// The noise distribution is a Dirac delta and the quantity is undefined.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    /// A file could not be read or written.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A serialised artifact is malformed.
    #[error("format error: {0}")]
    Format(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
