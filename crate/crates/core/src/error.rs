use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("symplectic form must have even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix is not skew-symmetric (entry ({row}, {col}) breaks M^T = -M)")]
    NotSkewSymmetric { row: usize, col: usize },
    #[error("form is degenerate (rank {rank} < dimension {dim})")]
    Degenerate { rank: usize, dim: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("not an isometry: {0}")]
    NotIsometry(String),
    #[error("no valid psi, psi~ pair exists: the state space has dimension {0}")]
    NoValidPair(usize),
    #[error("diagram ill-formed: {0}")]
    IllFormed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape(context: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::Shape {
        context,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
