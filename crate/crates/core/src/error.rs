use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable `{name}` at offset {offset} exceeds arity {arity}")]
    VariableOutOfRange {
        name: String,
        offset: usize,
        arity: usize,
    },

    #[error("invalid program: {0}")]
    InvalidProgram(String),

    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid map dimensions: {0}")]
    Dimension(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Bracketing failed: both ends classify alike, or a doubling could not be found.
    #[error("bracketing failed: {0}")]
    Bracket(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),
}

impl Error {
    /// `true` for failures of a numerical procedure on valid input, as opposed
    /// to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Bracket(_) | Error::NoConvergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
