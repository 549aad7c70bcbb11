use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which half of a saddle-point system an inner solve belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Velocity,
    Pressure,
}

impl std::fmt::Display for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Block::Velocity => f.write_str("velocity"),
            Block::Pressure => f.write_str("pressure"),
        }
    }
}

/// Payload of a Krylov or fixed-point solve that ran out of iterations.
#[derive(Debug, Clone)]
pub struct NonConvergence {
    pub what: String,
    pub iterations: usize,
    pub best: Vec<f64>,
    pub history: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("meshing failed in region {region}: {reason}")]
    Meshing { region: String, reason: String },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    Singular { column: usize, pivot: f64 },

    #[error("{} did not converge after {} iterations (last residual {:e})",
        .0.what, .0.iterations, .0.history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence(Box<NonConvergence>),

    #[error("{block} block solve failed: {source}")]
    InnerSolve {
        block: Block,
        #[source]
        source: Box<Error>,
    },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error for `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("missing artifact {path}: run `{command}` first")]
    Dependency { path: PathBuf, command: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
