use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported dimension {0} (only n = 2 and n = 3 are evaluated)")]
    UnsupportedDimension(usize),

    #[error("Bessel order {order} exceeds the supported cap {cap}")]
    OrderTooLarge { order: f64, cap: f64 },

    #[error("quadrature did not converge with {nodes} nodes (last change {achieved:e})")]
    QuadratureNotConverged { nodes: usize, achieved: f64 },

    #[error("schedule does not satisfy the summability condition: {0}")]
    NonScattering(String),

    #[error("scan needs {required} bytes but the budget is {budget}; try resolution {suggested:.5}")]
    MemoryBudget {
        required: u64,
        budget: u64,
        suggested: f64,
    },

    #[error("degenerate density: {0}")]
    Degenerate(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
