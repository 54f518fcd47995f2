use thiserror::Error;

/// Errors produced by the solver and its verification tools.
#[derive(Debug, Error)]
pub enum FdError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing history: {0}")]
    MissingHistory(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sufficient convergence condition not met (r_n = {rn}); bounds not applicable")]
    BoundNotApplicable { rn: String },

    #[error("{what} did not converge after {iterations} iterations (residual {residual})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: String,
    },

    #[error("singular matrix at pivot {0}")]
    Singular(usize),
}

pub type Result<T, E = FdError> = std::result::Result<T, E>;
