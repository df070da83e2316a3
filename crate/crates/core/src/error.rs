use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    InvalidInput(String),

    /// An improvement level has zero success probability, so its geometric
    /// waiting time has no finite mean.
    #[error("expected waiting time diverges at bin {kappa_done}, level {level}")]
    DivergentExpectation { kappa_done: usize, level: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    /// Bin size M = 2 makes the (M/2 - 1) prefactor of the closed form vanish.
    #[error("closed form is degenerate for bin size M = {0}")]
    DegeneratePrefactor(usize),

    #[error("argument {0} is outside the function domain")]
    Domain(f64),

    #[error("quadrature did not converge: estimate {estimate}, error {error_estimate:e}")]
    NumericFailure { estimate: f64, error_estimate: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
