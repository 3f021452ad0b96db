use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the function.
    #[error("{name} = {value} is outside the domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The reciprocal normal density at `x` exceeds the largest finite double.
    #[error("Mill's ratio overflows at x = {x}; use the log-scale variant")]
    MillsOverflow { x: f64 },

    #[error("invalid Lasso parameters (a = {a}, b = {b}, c = {c}): {reason}")]
    InvalidParams {
        a: f64,
        b: f64,
        c: f64,
        reason: &'static str,
    },

    /// The parameters are valid but sit on a limit (a = 0) that the
    /// density/CDF/quantile surface does not cover.
    #[error("a = 0 is not supported here (b = {b}, c = {c}); see `classify_limit`")]
    ZeroQuadratic { b: f64, c: f64 },

    #[error("Cholesky factorization failed: matrix of order {order} is not positive definite (min diagonal {min_diag:e})")]
    NotPositiveDefinite { order: usize, min_diag: f64 },

    #[error("sampler state became non-finite at iteration {iteration}: {what}")]
    NonFinite { iteration: usize, what: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("CSV parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }
}
