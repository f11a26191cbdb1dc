use thiserror::Error;

/// Errors raised by manifold construction, the solvers and scenario handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid manifold: {0}")]
    InvalidManifold(String),

    #[error("warp is non-positive ({value}) at radius {radius}")]
    NonPositiveWarp { radius: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("region is empty: {0}")]
    EmptyRegion(String),

    #[error("region is disconnected ({components} components)")]
    DisconnectedRegion { components: usize },

    #[error("radius {radius} exceeds the truncation radius {truncation}")]
    BeyondTruncation { radius: f64, truncation: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("exp(-f) overflows at node {node} (f = {value})")]
    Overflow { node: usize, value: f64 },

    #[error("{solver} did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("objective decreased past the floor {floor}: unbounded-below suspicion")]
    UnboundedBelow { floor: f64 },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
