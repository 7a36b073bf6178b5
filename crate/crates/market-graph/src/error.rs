//! Error type shared across the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building matrices, running tests or
/// loading data. Validation errors name the first violated property.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A scalar argument is outside its mathematical domain.
    #[error("{what} = {value} is outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Rows of inconsistent length, or a non-square matrix.
    #[error("matrix is not square: expected {expected} columns, row {row} has {got}")]
    NotSquare {
        row: usize,
        expected: usize,
        got: usize,
    },

    /// Symmetry violated beyond tolerance.
    #[error("matrix is asymmetric at ({i},{j}): {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },

    /// A correlation matrix diagonal entry differs from 1.
    #[error("diagonal entry ({i},{i}) is {value}, expected 1")]
    NonUnitDiagonal { i: usize, value: f64 },

    /// An entry lies outside the valid range for the matrix kind.
    #[error("entry ({i},{j}) = {value} is outside [{lo}, {hi}]")]
    EntryOutOfRange {
        i: usize,
        j: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Cholesky factorization failed even after the documented jitter retry.
    #[error("matrix is not positive semidefinite (Cholesky failed even with diagonal jitter {jitter:e})")]
    NotPositiveSemidefinite { jitter: f64 },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Paired series of different lengths.
    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A series with zero sum of squares; its correlation is undefined.
    #[error("series {index} is degenerate (all zero after centering)")]
    DegenerateSeries { index: usize },

    /// |r| = 1 makes the Fisher statistic infinite.
    #[error("sample correlation has magnitude 1; Fisher statistic is infinite")]
    InfiniteStatistic,

    /// A non-numeric cell where a number was required (1-based positions).
    #[error("cannot parse {content:?} as a number at row {row}, column {col}")]
    Parse {
        row: usize,
        col: usize,
        content: String,
    },

    /// Not enough data to do anything useful.
    #[error("need at least {min} {what}, found {got}")]
    TooFew {
        what: &'static str,
        min: usize,
        got: usize,
    },

    /// A value that must be finite is not.
    #[error("non-finite value {value} at ({i},{j})")]
    NonFinite { i: usize, j: usize, value: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
