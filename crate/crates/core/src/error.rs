use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the geometry and algebra routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error in `{node}`: {message}")]
    Domain { node: String, message: String },

    #[error("metric is singular at the point (det = {det:e})")]
    SingularMetric { det: f64 },

    #[error("metric has signature ({found_p},{found_q}), expected ({p},{q})")]
    WrongSignature { p: usize, q: usize, found_p: usize, found_q: usize },

    #[error("Gram-Schmidt broke down under every coordinate ordering")]
    FrameBreakdown,

    #[error("matrix is not antisymmetric (residual {residual:e})")]
    NotAntisymmetric { residual: f64 },

    #[error("vector field is not Killing at the point (residual {residual:e})")]
    NotKilling { residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid geometry: {0}")]
    InvalidSpec(String),

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("flow integration failed: {0}")]
    Integrator(String),
}

impl Error {
    /// True for errors that come from the mathematics at a point (domain,
    /// singular metric, failed precondition) rather than from malformed input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::SingularMetric { .. }
                | Error::WrongSignature { .. }
                | Error::FrameBreakdown
                | Error::NotAntisymmetric { .. }
                | Error::NotKilling { .. }
                | Error::Precondition(_)
                | Error::SingularMatrix
                | Error::Integrator(_)
        )
    }
}
