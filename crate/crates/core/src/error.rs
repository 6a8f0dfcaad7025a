use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("at least one kappa parameter is required")]
    EmptyKappas,

    #[error("kappa_{index} = {value} is not a finite real number")]
    NonFiniteParameter { index: usize, value: f64 },

    #[error("kappa_{index} = {value} must be nonnegative")]
    NegativeKappa { index: usize, value: f64 },

    #[error("kappa_1 = {value} < 0 requires -1/kappa_1 to be a positive integer")]
    NonIntegerDimension { value: f64 },

    #[error("index {n} is outside the representation range (limit {limit})")]
    OutOfRange { n: usize, limit: usize },

    #[error("expected a {expected} representation")]
    WrongClass { expected: &'static str },

    #[error("kappa_{index} = {value}: 1/kappa is not a positive integer")]
    NotIntegerReciprocal { index: usize, value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("singular triangular system at row {row}")]
    Singular { row: usize },

    #[error("quadrature did not converge: estimate {value} with error {error}")]
    QuadratureFailed { value: f64, error: f64 },

    #[error("fit did not converge after {iterations} iterations (residual {residual})")]
    FitFailed { iterations: usize, residual: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
