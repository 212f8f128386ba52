use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty range: limit {0} is below 2")]
    EmptyRange(u64),

    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("residue {b} is not coprime to W = {modulus}")]
    InvalidResidue { b: u64, modulus: u64 },

    #[error("incomplete coloring: {0}")]
    IncompleteColoring(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("color classes overlap at x = {0}")]
    Partition(u64),

    #[error("numeric instability: {0}")]
    Numeric(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("stage `{stage}` failed")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
