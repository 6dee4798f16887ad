use thiserror::Error;

/// Errors produced anywhere in the clustering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// All samples coincide, so no kernel scale can be derived.
    #[error("degenerate scale: mean pairwise distance is zero")]
    DegenerateScale,

    /// A vertex has zero degree, so degree normalization is undefined.
    #[error("degenerate graph: vertex {vertex} has zero degree")]
    DegenerateGraph { vertex: usize },

    /// A spectral embedding row is (numerically) zero and cannot be normalized.
    #[error("degenerate embedding row for vertex {vertex}")]
    DegenerateRow { vertex: usize },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Broad failure classes, used by the command line driver to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_) => ErrorClass::Usage,
            Error::InvalidInput(_)
            | Error::EmptyDataset
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::Csv(_) => ErrorClass::Data,
            Error::DegenerateScale
            | Error::DegenerateGraph { .. }
            | Error::DegenerateRow { .. }
            | Error::Eigen(_)
            | Error::Invariant(_) => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
