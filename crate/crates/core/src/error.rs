use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing embeddings for {} label(s): {}", .0.len(), .0.join(", "))]
    MissingEmbeddings(Vec<String>),

    #[error("zero-norm embedding vector for label {0:?}")]
    ZeroNorm(String),

    #[error("graph with {nodes} nodes exceeds the dense eigensolver limit of {limit}; subsample the graph or analyze a smaller snapshot")]
    TooLarge { nodes: usize, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("non-finite policy gradient at step {step}")]
    NonFiniteGradient { step: usize },

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("episode {episode}, step {step}: {source}")]
    AtStep {
        episode: usize,
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn at_iteration(self, iteration: u64) -> Self {
        Error::AtIteration {
            iteration,
            source: Box::new(self),
        }
    }

    /// True when the error reflects a broken internal guarantee rather than bad input.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Invariant(_) | Error::Numerical(_) => true,
            Error::AtIteration { source, .. } | Error::AtStep { source, .. } => source.is_internal(),
            _ => false,
        }
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::InvalidInput(_) => "invalid_input",
            Error::MissingEmbeddings(_) => "missing_embeddings",
            Error::ZeroNorm(_) => "zero_norm",
            Error::TooLarge { .. } => "too_large",
            Error::Numerical(_) => "numerical",
            Error::NonFiniteGradient { .. } => "non_finite_gradient",
            Error::AtIteration { source, .. } | Error::AtStep { source, .. } => source.kind(),
            Error::Invariant(_) => "invariant",
        }
    }
}
