use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid sampled space: {0}")]
    InvalidSpace(String),
    #[error("Hölder seminorm undefined: no pair at finite nonzero distance")]
    UndefinedSeminorm,
    #[error("exponent fit needs at least 3 usable distance bins, found {bins}")]
    Fit { bins: usize },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("graph is disconnected: vertex {0} unreachable")]
    Disconnected(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("ellipticity violated at time {time}: coefficient {coefficient} below {eta}")]
    Ellipticity { time: f64, coefficient: f64, eta: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
