use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("weight is not integrable: {0}")]
    Integrability(String),

    #[error("weight integral is numerically zero and cannot be normalized")]
    Normalization,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expression evaluation failed: {0}")]
    Evaluation(String),

    #[error("quadrature did not converge (worst entry {index}, estimated error {estimate:e})")]
    Quadrature { index: usize, estimate: f64 },

    #[error("Hankel matrix B_{degree} is singular (|det| = {det:e})")]
    SingularHankel { degree: usize, det: f64 },

    #[error("solved polynomial of degree {degree} has a vanishing leading coefficient")]
    DegenerateDegree { degree: usize },

    #[error("linear system is singular: {0}")]
    SingularSystem(String),

    #[error("sparsity pattern {pattern:?} is inconsistent: coefficient {index} vanishes")]
    InconsistentPattern { pattern: Vec<usize>, index: usize },

    #[error("function is constant on the interval")]
    ConstantFunction,

    #[error("need {needed} moments, have {available}")]
    InsufficientMoments { needed: usize, available: usize },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("polynomials are not proportional (first offending coefficient {index})")]
    NotProportional { index: usize },

    #[error("exact arithmetic unavailable: {0}")]
    ExactUnavailable(String),

    #[error("complex value where a real one is required: {0}")]
    ComplexArgument(String),
}

impl Error {
    /// Configuration and input errors as opposed to numerical failures.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Syntax { .. }
                | Error::UnknownIdentifier { .. }
                | Error::InvalidParameter(_)
                | Error::DegreeMismatch { .. }
                | Error::ExactUnavailable(_)
                | Error::ConstantFunction
                | Error::ComplexArgument(_)
        )
    }
}
