use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph has no edges; link budgets cannot be sampled")]
    NoEdges,

    #[error("neighbor {0} is out of range for a graph with {1} nodes")]
    NeighborOutOfRange(usize, usize),

    #[error("neighbor {0} is an injected node; injected nodes only link to original nodes")]
    NeighborIsInjected(usize),

    #[error("class {0} has no member nodes")]
    EmptyClass(usize),

    #[error("every original node carries label {0}; no candidate endpoints remain")]
    NoCandidates(usize),

    #[error("only {available} candidates available for a link budget of {budget}")]
    TooFewCandidates { available: usize, budget: usize },

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("dataset {path}: {message}")]
    Dataset { path: PathBuf, message: String },

    #[error("malformed model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGraph(_) => "invalid_graph",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::EmptyGraph => "empty_graph",
            Error::NoEdges => "no_edges",
            Error::NeighborOutOfRange(..) => "neighbor_out_of_range",
            Error::NeighborIsInjected(_) => "neighbor_is_injected",
            Error::EmptyClass(_) => "empty_class",
            Error::NoCandidates(_) => "no_candidates",
            Error::TooFewCandidates { .. } => "too_few_candidates",
            Error::NonFiniteLoss { .. } => "non_finite_loss",
            Error::Dataset { .. } => "dataset",
            Error::ModelFormat(_) => "model_format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
