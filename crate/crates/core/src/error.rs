// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // graph construction
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("edge ({u}, {v}) references unknown node `{missing}`")]
    DanglingEdge {
        u: String,
        v: String,
        missing: String,
    },
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),
    #[error("node `{id}`: invalid coordinate {what}")]
    InvalidCoordinate { id: String, what: String },
    #[error("edge ({u}, {v}): {what} must be positive, got {value}")]
    NonPositiveWeight {
        u: String,
        v: String,
        what: String,
        value: f64,
    },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown epoch `{0}`")]
    UnknownEpoch(String),

    // measures
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("need at least {required} nodes, got {actual}")]
    TooFewNodes { required: usize, actual: usize },
    #[error("node `{0}` has no coordinates")]
    MissingCoordinates(String),
    #[error("node `{0}` is isolated")]
    IsolatedNode(String),

    // null models
    #[error("need at least {required} edges, got {actual}")]
    TooFewEdges { required: usize, actual: usize },
    #[error(
        "replicate {replicate}: {accepted}/{requested} swaps accepted after {attempts} attempts"
    )]
    SwapBudgetExhausted {
        replicate: usize,
        accepted: usize,
        requested: usize,
        attempts: usize,
    },

    // small world
    #[error("omega undefined: {0} is zero")]
    ZeroClustering(&'static str),
    #[error("omega undefined: empirical path length is zero")]
    ZeroPathLength,

    // communities
    #[error("assignment is missing node `{0}`")]
    IncompleteAssignment(String),

    // fitting
    #[error("need at least {required} points, got {actual}")]
    InsufficientPoints { required: usize, actual: usize },
    #[error("non-positive value {value} at x = {x} cannot be log-transformed")]
    NonPositiveValues { x: f64, value: f64 },
    #[error("need at least {required} degree classes, got {actual}")]
    InsufficientClasses { required: usize, actual: usize },

    // empirical
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("class {0} has no predictors")]
    EmptyClass(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("design matrix is rank deficient (column `{0}`)")]
    RankDeficient(String),
    #[error("need more than {required} rows, got {actual}")]
    TooFewRows { required: usize, actual: usize },
    #[error("variables table has no response column tagged `:Y`")]
    MissingResponse,

    // ingestion / configuration
    #[error("{file}:{line}: {message}")]
    Schema {
        file: String,
        line: u64,
        message: String,
    },
    #[error("{file}:{line}: negative weight {value}")]
    NegativeWeight { file: String, line: u64, value: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("report does not match schema: {0}")]
    InvalidReport(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Errors caused by malformed input rather than by a computation.
    pub fn is_schema(&self) -> bool {
        matches!(
            self,
            Error::DuplicateNode(_)
                | Error::DanglingEdge { .. }
                | Error::SelfLoop(_)
                | Error::DuplicateEdge(..)
                | Error::InvalidCoordinate { .. }
                | Error::NonPositiveWeight { .. }
                | Error::MissingResponse
                | Error::Schema { .. }
                | Error::NegativeWeight { .. }
                | Error::Config(_)
                | Error::InvalidReport(_)
                | Error::Io(_)
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DuplicateNode(_) => "DuplicateNode",
            Error::DanglingEdge { .. } => "DanglingEdge",
            Error::SelfLoop(_) => "SelfLoop",
            Error::DuplicateEdge(..) => "DuplicateEdge",
            Error::InvalidCoordinate { .. } => "InvalidCoordinate",
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::UnknownNode(_) => "UnknownNode",
            Error::UnknownEpoch(_) => "UnknownEpoch",
            Error::Disconnected { .. } => "Disconnected",
            Error::TooFewNodes { .. } => "TooFewNodes",
            Error::MissingCoordinates(_) => "MissingCoordinates",
            Error::IsolatedNode(_) => "IsolatedNode",
            Error::TooFewEdges { .. } => "TooFewEdges",
            Error::SwapBudgetExhausted { .. } => "SwapBudgetExhausted",
            Error::ZeroClustering(_) => "ZeroClustering",
            Error::ZeroPathLength => "ZeroPathLength",
            Error::IncompleteAssignment(_) => "IncompleteAssignment",
            Error::InsufficientPoints { .. } => "InsufficientPoints",
            Error::NonPositiveValues { .. } => "NonPositiveValues",
            Error::InsufficientClasses { .. } => "InsufficientClasses",
            Error::ZeroVariance(_) => "ZeroVariance",
            Error::EmptyClass(_) => "EmptyClass",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::RankDeficient(_) => "RankDeficient",
            Error::TooFewRows { .. } => "TooFewRows",
            Error::MissingResponse => "MissingResponse",
            Error::Schema { .. } => "Schema",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::Config(_) => "Config",
            Error::InvalidReport(_) => "InvalidReport",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
