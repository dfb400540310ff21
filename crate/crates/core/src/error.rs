use thiserror::Error;

pub type Result<T> = std::result::Result<T, FinslerError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FinslerError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("point outside the metric's domain: {0}")]
    Domain(String),

    #[error("vector below the slit-bundle guard (norm {norm:e} < {guard:e})")]
    Slit { norm: f64, guard: f64 },

    #[error("degenerate matrix (condition estimate {condition:e})")]
    Degenerate { condition: f64 },

    #[error("degenerate flag: Cauchy-Schwarz gap {gap:e}")]
    DegenerateFlag { gap: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("shooting did not converge after {restarts} restarts (best residual {best_residual:e})")]
    Shooting {
        restarts: usize,
        best_residual: f64,
        /// Length of the best discrete polyline found, an upper bound for the distance.
        upper_bound: Option<f64>,
    },

    #[error("Newton iteration diverged: {0}")]
    Newton(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FinslerError {
    fn from(e: std::io::Error) -> Self {
        FinslerError::Io(e.to_string())
    }
}
