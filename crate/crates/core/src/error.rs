use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed model: {0}")]
    MalformedModel(String),

    #[error("node index {index} out of range for graph with {n} nodes")]
    BadNode { index: usize, n: usize },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("bad matrix: {0}")]
    BadMatrix(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("graph with {n} nodes exceeds the exact enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("training diverged at iteration {iteration}")]
    DivergedTraining { iteration: usize },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
