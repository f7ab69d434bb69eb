use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the chart domain")]
    OutsideChart { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("field representation not supported here: {0}")]
    UnsupportedField(String),

    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("metric is not positive definite")]
    NotPositiveDefinite,

    #[error("operator is not symmetric with respect to the metric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },

    #[error("invalid seed vector: {0}")]
    InvalidSeed(String),

    #[error("structure is Sasakian degenerate (lambda = {lambda:.3e})")]
    SasakianDegenerate { lambda: f64 },

    #[error("operation needs curvature, but the structure is a synthetic pointwise realization")]
    NoCurvature,

    #[error("not enough independent samples for the least-squares fit")]
    InsufficientSamples,

    #[error("structure is not accepted as a (kappa, mu)-space (residual {residual:.3e} > {threshold:.1e})")]
    NotKappaMu { residual: f64, threshold: f64 },

    #[error("Boeckx index undefined: kappa = {kappa} must be < 1")]
    IndexUndefined { kappa: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("vector is not horizontal (eta = {eta:.3e}); the operator is defined on Ker(eta) only")]
    NotHorizontal { eta: f64 },

    #[error("tensor is not projectable (Lie derivative along xi has size {residual:.3e})")]
    NotProjectable { residual: f64 },

    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
