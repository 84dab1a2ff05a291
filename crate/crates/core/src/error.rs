use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("contraction capacity exceeded: {wires} wire indices, limit {limit}")]
    Capacity { wires: usize, limit: usize },

    #[error("boundary arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("malformed diagram: {0}")]
    Malformed(String),

    #[error("bit-matrix dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("rule does not match at the given site: {0}")]
    NoMatch(String),

    #[error("missing replication count for box `{0}`")]
    MissingCount(String),

    #[error("malformed !-box structure: {0}")]
    MalformedBoxes(String),

    #[error("template is outside the arrow dictionary: {0}")]
    Dictionary(String),

    #[error("scalable type mismatch: {0}")]
    TypeMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("mining search space exceeds cap: {candidates} candidates, cap {cap}")]
    SearchSpace { candidates: u64, cap: u64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
