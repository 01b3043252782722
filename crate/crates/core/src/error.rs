use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Evaluation outside the domain of a function, e.g. the singular path
    /// loss at distance zero.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    /// The adaptive integrator ran out of budget. `value` is the best
    /// estimate reached, `abs_error` its error estimate.
    #[error(
        "quadrature did not converge: estimate {value} +/- {abs_error:e} after {evaluations} evaluations"
    )]
    NonConvergence {
        value: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("statistical error: {0}")]
    Statistical(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("sampled interferer coincides with receiver {receiver} under singular path loss")]
    SingularGeometry { receiver: usize },
}
