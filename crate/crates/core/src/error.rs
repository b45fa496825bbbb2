use thiserror::Error;

/// Errors produced by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coefficient sequence: {0}")]
    InvalidSequence(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("ellipticity violated at node {node}: coefficient {value} outside [{alpha}, {beta}]")]
    Ellipticity {
        node: usize,
        value: f64,
        alpha: f64,
        beta: f64,
    },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("argument {value} outside the domain of {what} (radius {radius})")]
    Domain {
        what: &'static str,
        value: f64,
        radius: f64,
    },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("degenerate weight: weighted norm of the test function is zero")]
    DegenerateWeight,

    #[error("test function {index} is nonzero on the boundary")]
    BoundaryViolation { index: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
