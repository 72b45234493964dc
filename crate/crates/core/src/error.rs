use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("missing dataset file: {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{line}: {reason}")]
    MalformedLine { file: String, line: usize, reason: String },
    #[error("label {label} of node {node} is outside [0, {num_clusters})")]
    LabelOutOfRange { node: usize, label: usize, num_clusters: usize },
    #[error("edge ({0}, {1}) is listed in one direction only while other edges are listed in both")]
    AsymmetryDetected(usize, usize),
    #[error("self loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node id {node} out of range for {num_nodes} nodes")]
    NodeOutOfRange { node: usize, num_nodes: usize },
    #[error("{what}: expected {expected}, found {found}")]
    ShapeMismatch { what: &'static str, expected: usize, found: usize },
    #[error("operation requires ground-truth labels")]
    LabelsRequired,
    #[error("requested {requested} cross-class edges but only {available} are available")]
    NotEnoughCrossClassPairs { requested: usize, available: usize },
    #[error("invalid metadata: {0}")]
    InvalidMeta(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("{what}: expected {expected}, found {found}")]
    ShapeMismatch { what: String, expected: usize, found: usize },
    #[error("invalid encoder config: {0}")]
    InvalidConfig(String),
    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum StructError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("auxiliary subset is empty")]
    EmptySubset,
    #[error("{what}: expected {expected}, found {found}")]
    ShapeMismatch { what: &'static str, expected: usize, found: usize },
    #[error("node index {0} out of range")]
    InvalidIndex(usize),
    #[error("refusing to materialize a {rows}x{cols} modularity block (cap {cap} nodes)")]
    DenseTooLarge { rows: usize, cols: usize, cap: usize },
    #[error("alpha must be non-negative, got {0}")]
    NegativeAlpha(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum AssignError {
    #[error("no non-empty modules")]
    NoModules,
    #[error("landmark set is empty")]
    EmptyLandmarks,
    #[error("landmark column {0} receives no mass")]
    DegenerateColumn(usize),
    #[error("every landmark column is degenerate")]
    AllColumnsDegenerate,
    #[error("{what}: expected {expected}, found {found}")]
    ShapeMismatch { what: &'static str, expected: usize, found: usize },
    #[error("degrees of freedom must be positive, got {0}")]
    InvalidNu(f64),
    #[error("landmark count must be at least 1")]
    ZeroLandmarks,
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("non-finite loss at epoch {epoch}: {dump}")]
    NonFiniteLoss { epoch: usize, dump: String },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error(transparent)]
    Assign(#[from] AssignError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("label length mismatch: truth={truth}, pred={pred}")]
    LengthMismatch { truth: usize, pred: usize },
}
