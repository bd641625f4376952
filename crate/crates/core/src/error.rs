use thiserror::Error;

/// Errors raised by the exact-arithmetic and preorder operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different number fields")]
    FieldMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("minimal polynomial is reducible over Q: {0}")]
    Reducible(String),
    #[error("invalid minimal polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("isolating interval does not isolate exactly one real root: {0}")]
    BadIsolatingInterval(String),
    #[error("irreducibility check unsupported for degree {0}; pass assert-irreducible")]
    UnsupportedDegree(usize),
    #[error("index {index} out of range 0..={max}")]
    Range { index: usize, max: usize },
    #[error("basis does not span the residue group: {0}")]
    Basis(String),
    #[error("subspace is not contained in the residue group")]
    NotContained,
    #[error("preorder is an isolated point")]
    Isolated,
    #[error("no witness found within the search budget: {0}")]
    WitnessNotFound(String),
    #[error("preorder types differ: {0:?} vs {1:?}")]
    TypeMismatch(Vec<usize>, Vec<usize>),
    #[error("preorder is trivial")]
    TrivialPreorder,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("matrix is singular")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
