use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group elements or characters belong to different groups")]
    GroupMismatch,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("n·d = {n}·{d} is odd; no {d}-regular graph on {n} vertices exists")]
    DegreeParity { n: usize, d: usize },
    #[error("rejection budget of {0} attempts exhausted")]
    RejectionBudget(usize),
    #[error("invalid signing: {0}")]
    InvalidSigning(String),
    #[error("group action is not transitive; lift would be disconnected (pass the override to allow it)")]
    NonTransitive,
    #[error("lift collision: {0}")]
    LiftCollision(String),
    #[error("dense dimension {dim} exceeds guard {limit}")]
    DimensionGuard { dim: usize, limit: usize },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("vector is not an eigenvector (residual {0:e})")]
    NotEigenvector(f64),
    #[error("transported vector vanishes; eigenvalue root is degenerate")]
    DegenerateTransport,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("not a subgraph of the ambient graph: {0}")]
    NotSubgraph(String),
    #[error("malformed encoding: {0}")]
    Decode(String),
    #[error("enumeration guard exceeded: {0}")]
    EnumerationGuard(String),
    #[error("parameter regime violated: {0}")]
    Regime(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("empty signing distribution")]
    EmptySupport,
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
