use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("structure violation in {what}: residual {residual:.3e}")]
    StructureViolation { what: &'static str, residual: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("stationary state is not unique (relative pivot {pivot:.3e})")]
    NonUniqueStationary { pivot: f64 },

    #[error("word of length {len} exceeds the maximum {max}")]
    WordTooLong { len: usize, max: usize },

    #[error("{modes} modes exceed the dense limit of {max}")]
    TooLarge { modes: usize, max: usize },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("unsupported isomorphism: {0}")]
    UnsupportedIso(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
