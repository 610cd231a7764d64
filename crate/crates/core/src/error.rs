use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Position-annotated failure while reading an expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unbound name `{name}` at byte {offset}")]
    UnboundName { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnboundName { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("quadrature did not converge: estimate {value} with error {error} after {intervals} intervals")]
    NoConvergence {
        value: f64,
        error: f64,
        intervals: usize,
    },

    #[error("{which} is not integrable on ({a}, {b}) at the requested precision")]
    NotIntegrable { which: String, a: f64, b: f64 },

    #[error("p must be positive almost everywhere; found p({x}) = {value}")]
    NonPositiveP { x: f64, value: f64 },

    #[error("initial point {x0} is a declared singular endpoint")]
    SingularInitialPoint { x0: f64 },

    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },

    #[error("the trivial solution was requested without opting in")]
    TrivialSolution,

    #[error("solutions belong to different coefficient sets")]
    MismatchedCoefficients,

    #[error("function does not vanish at {which} endpoint: |value| = {value} exceeds {limit}")]
    EndpointNotVanishing {
        which: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("function is identically zero")]
    TrivialFunction,

    #[error("supplied function is not a solution of its equation (relative residual {residual})")]
    NotASolution { residual: f64 },

    #[error("hypothesis violated at x = {x}: {what}")]
    Hypothesis { what: String, x: f64 },

    #[error("no solution vanishing at both endpoints: u(b) = {residual} (scale {scale})")]
    NoVanishingSolution { residual: f64, scale: f64 },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn hypothesis(what: impl Into<String>, x: f64) -> Self {
        Error::Hypothesis {
            what: what.into(),
            x,
        }
    }

    /// True for failures that mean a theorem's assumptions do not hold for
    /// the supplied data, as opposed to malformed input.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis { .. } | Error::NoVanishingSolution { .. } | Error::EndpointNotVanishing { .. }
        )
    }
}
