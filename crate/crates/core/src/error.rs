use thiserror::Error;

use crate::engine::IntegrationResult;
use crate::float_model::ModelName;

pub type Result<T, E = QuadError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum QuadError {
    #[error("window t_n = {window} exceeds the window limit {limit}")]
    WindowExceeded { window: f64, limit: f64 },

    #[error("{quantity} at node {index} is {value:e}, below the underflow level {ufl:e}")]
    UnderflowDetected {
        index: usize,
        quantity: &'static str,
        value: f64,
        ufl: f64,
    },

    #[error("order {n} exceeds the maximal order {n_max} for optimal spacing")]
    OrderExceedsMax { n: usize, n_max: usize },

    #[error("integrand returned {value} at {point:?}")]
    EvaluationFailure { point: Vec<f64>, value: f64 },

    #[error("integrand arity {arity} does not match {domains} domain(s)")]
    DimensionMismatch { arity: usize, domains: usize },

    #[error(
        "not converged: best value {} at order {} (error estimate {:e})",
        .0.value, .0.order, .0.error_estimate
    )]
    NotConverged(Box<IntegrationResult>),

    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("unknown benchmark case '{0}'")]
    UnknownCase(String),

    #[error("{0} arithmetic is not available on this platform")]
    UnsupportedModel(ModelName),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl QuadError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QuadError::InvalidArgument(msg.into())
    }
}
