use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("arity mismatch: expected {expected}, found {found}")]
pub struct ArityError {
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeilError {
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<u32>, right: Vec<u32> },
    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("generator d{index} is identically zero (truncation order 0)")]
    DegenerateGenerator { index: usize },
    #[error("multi-index {alpha:?} lies outside the box {orders:?}")]
    OutsideBox { alpha: Vec<u32>, orders: Vec<u32> },
    #[error("element has zero constant term and is not invertible")]
    NotInvertible,
    #[error(transparent)]
    Arity(#[from] ArityError),
}

/// Syntax error with a 1-based position and the set of tokens that would
/// have been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message} (expected {})", expected.join(", "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    /// The denominator of a division evaluated to a non-unit.
    #[error("division by a non-invertible value in `{denominator}`")]
    NotInvertible { denominator: String },
    #[error("expression uses x{index} but only {provided} argument(s) were given")]
    MissingArgument { index: usize, provided: usize },
    #[error(transparent)]
    Weil(#[from] WeilError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Weil(#[from] WeilError),
    #[error(transparent)]
    Arity(#[from] ArityError),
    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    /// An expansion that must hold exactly did not; this is an engine bug.
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    /// A rule instance whose preconditions do not hold.
    #[error("instance rejected: {0}")]
    InstanceRejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("expression contains a division and has no polynomial normal form")]
    NotPolynomial,
    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
