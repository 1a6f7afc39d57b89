//! Link prediction for partially observed networks.
//!
//! The observed adjacency matrix is treated as a noisy sample of an unknown
//! true network: true edges are recorded with probability `alpha`, absent
//! edges with probability `beta`. Ranking node pairs by the probability of an
//! *observed* edge is then equivalent to ranking them by the probability of a
//! *true* edge, so the library estimates observed-edge probabilities directly
//! by penalized least squares: a squared-error loss against the observed
//! matrix plus a smoothing penalty that ties together the scores of node
//! pairs whose endpoints are similar.
//!
//! The pieces, bottom to top:
//!
//! - [`graph`]: adjacency matrices, observation masks, covariate tables.
//! - [`error_model`]: the alpha/beta observation model and its monotonicity.
//! - [`similarity`]: node similarity matrices from covariates or topology.
//! - [`solver`]: the four penalized criteria (directed/undirected ×
//!   full-sum/partial-sum) with a direct linear solve and a block
//!   coordinate descent path.
//! - [`cv`]: K-fold cross-validation over network entries to choose the
//!   penalty weight.
//! - [`eval`]: test-set ranking, ROC curves, AUC.
//! - [`sim`]: synthetic network generators and the observation process.
//! - [`io`]: edge-list, mask, covariate, similarity and score file formats.

pub mod cv;
pub mod error_model;
pub mod eval;
pub mod graph;
pub mod io;
pub mod sim;
pub mod similarity;
pub mod solver;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use error_model::ErrorModel;
pub use eval::RocCurve;
pub use graph::{AdjacencyMatrix, CovariateTable, ObservationMask};
pub use similarity::SimilarityMatrix;
pub use solver::{Method, ScoreMatrix, SolveReport, SolverConfig};
