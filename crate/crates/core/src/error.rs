use std::path::PathBuf;

use thiserror::Error;

use crate::lp::FarkasCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid LP: {0}")]
    InvalidProblem(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// The reward family cannot be handled by the requested method.
    #[error("unsupported reward for this method: {0}")]
    UnsupportedReward(String),

    #[error("quality constraints unsatisfiable ({})", .0.summary())]
    Infeasible(Box<FarkasCertificate>),

    /// A period of the greedy baseline had no feasible modulation.
    #[error("greedy baseline infeasible in period {period}: {reason}")]
    GreedyInfeasible { period: usize, reason: String },

    #[error("LP unbounded: {0}")]
    Unbounded(String),

    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("time limit exceeded")]
    Timeout,

    #[error("polytope dimension {dim} exceeds the enumeration limit {limit}; use the occupancy LP instead")]
    DimensionLimit { dim: usize, limit: usize },

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("point is outside the convex hull of the generators")]
    OutsideHull,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal solver error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
