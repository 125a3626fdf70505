use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mask selects no coordinates")]
    EmptyMask,

    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),

    #[error("invalid sampling pattern: {0}")]
    InvalidPattern(String),

    /// The input lies outside the assumptions an operation is defined for
    /// (column support sizes, number of columns).
    #[error("pattern outside the supported regime: {0}")]
    Regime(String),

    #[error("{n} columns is too many for exhaustive subset enumeration (limit {limit})")]
    TooManyColumns { n: usize, limit: usize },

    #[error("restricted basis is rank deficient: {0}")]
    RankDeficient(String),

    #[error("projection kernel has dimension {0}, expected 1")]
    KernelDimension(usize),

    #[error("inconsistent observations: kernel dimension {kernel_dim} is below r = {r}")]
    Inconsistent { kernel_dim: usize, r: usize },

    #[error("candidate completion has rank {rank}, expected at most {r}")]
    CandidateRank { rank: usize, r: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, column: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        msg: msg.into(),
    }
}
