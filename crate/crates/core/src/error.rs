use thiserror::Error;

/// Errors raised by the model builders, solvers and drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cutoff {cutoff} exceeds the grid endpoint {lambda_max}")]
    CutoffExceedsGrid { cutoff: f64, lambda_max: f64 },

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("source index {0} is not in the declared source set")]
    UnknownSource(usize),

    #[error("invalid boundary parameters: alpha*delta - beta*gamma = {det} (must be 1)")]
    InvalidParams { det: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("operator is not hermitian (max defect {defect:e})")]
    InvalidOperator { defect: f64 },

    #[error("(1,...,1) is not in the range of S(lambda): residual {residual:e}")]
    NotInRange { residual: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("root at search interval boundary lambda = {lambda}; widen the interval")]
    WidenInterval { lambda: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
