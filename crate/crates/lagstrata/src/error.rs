use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("{0} is not a prime in the supported range")]
    InvalidPrime(u32),
    #[error("grade overflow: {0} + {1} > 6")]
    GradeOverflow(usize, usize),
    #[error("expected grade {expected}, got {found}")]
    WrongGrade { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero vector where a nonzero one is required")]
    ZeroVector,
    #[error("not Lagrangian: {0}")]
    NotLagrangian(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("subspace is not transverse to the frame's second Lagrangian")]
    NotTransverse,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("retry budget exhausted after {0} attempts")]
    RetriesExhausted(usize),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
