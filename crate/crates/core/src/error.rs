use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("node index {index} out of range for graph with {n_nodes} nodes")]
    NodeOutOfRange { index: usize, n_nodes: usize },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("lambda_2 is not simple (gap {0:e}); secular bracketing is ill-posed")]
    NotSimple(f64),

    #[error("exhaustive search would visit {subsets} subsets, above the limit of {limit}")]
    ExplosionGuard { subsets: u128, limit: u128 },

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("unknown config keys: {0}")]
    UnknownKeys(String),

    #[error("config validation: {0}")]
    ConfigValidation(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
