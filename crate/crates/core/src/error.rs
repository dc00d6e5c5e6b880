use thiserror::Error;

/// Errors raised by the geometry and series routines.
///
/// `Domain` covers precondition violations (bad input), `Numeric` covers
/// values that drift outside a tolerance window, and `Overflow` is raised
/// when a trace leaves the representable range during tree traversal.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("slopes {0} and {1} are not Farey neighbours (intersection number {2})")]
    NotNeighbors(String, String, i64),

    #[error("no admissible root > 2 for the third trace (discriminant {discriminant})")]
    NoAdmissibleRoot { discriminant: f64 },

    #[error("traces ({0}, {1}, {2}) violate the cubic: relative residual {3:e}")]
    CubicViolation(f64, f64, f64, f64),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("integer overflow in slope arithmetic")]
    IntegerOverflow,

    #[error("trace overflow at tree depth {depth}: {detail}")]
    Overflow { depth: u32, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
