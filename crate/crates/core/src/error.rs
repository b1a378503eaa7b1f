use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vertex index {index} out of range for the {n}-simplex")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("malformed affine simplex map: {0}")]
    MalformedMap(String),

    #[error("incompatible form family: {0}")]
    IncompatibleFamily(String),

    #[error("face {0:?} is not strictly increasing")]
    NonIncreasingFace(Vec<usize>),

    #[error("contraction axiom `{axiom}` fails: {detail}")]
    SideCondition { axiom: String, detail: String },

    #[error("perturbation is not filtration raising: {0}")]
    NotFiltrationRaising(String),

    #[error("cutoff overflow: {0}")]
    CutoffOverflow(String),

    #[error("algebra is not contractible: {0}")]
    NotContractible(String),

    #[error("Maurer-Cartan residual is nonzero: {0}")]
    NonzeroResidual(String),

    #[error("linear part has no section: {0}")]
    NotASection(String),

    #[error("invalid presentation: {0}")]
    Invalid(String),

    #[error("unsupported depth {0}")]
    Depth(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
