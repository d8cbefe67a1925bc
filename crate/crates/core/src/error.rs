use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The gradient residual vanished, so the current iterate already solves
    /// the sparsity-constrained least-squares problem.
    #[error("gradient residual is zero; the current iterate is a global solution")]
    ZeroResidual,

    #[error(
        "exhaustive enumeration of C({n}, {q}) = {count} supports exceeds the cap of {cap}; \
         shrink n or q, or raise the cap"
    )]
    Capacity {
        n: usize,
        q: usize,
        count: u128,
        cap: u128,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
