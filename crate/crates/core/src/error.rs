use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("node {node} out of range for a network of {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("invalid rate: {0}")]
    InvalidRate(String),

    #[error("component {component} has {size} nodes, exceeding the subset solver cap of {cap}")]
    ComponentTooLarge {
        component: usize,
        size: usize,
        cap: usize,
    },

    #[error("component {0} receives no source updates; its age is unbounded")]
    Unreachable(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("enumeration too large: {count} configurations (n = {n}, limit n <= {limit})")]
    TooManyConfigs { n: usize, count: u128, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
