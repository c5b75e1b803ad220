use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("search depth must be at least 1, got {0}")]
    InvalidDepth(usize),

    #[error("cannot plan from a terminal root state")]
    TerminalRoot,

    #[error("partial search tree has no leaves (every path ends in a terminal state)")]
    NoLeaves,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value: {0}")]
    NonFinite(f64),

    #[error("candidate leaf {index} out of range (leaf count {count})")]
    InvalidCandidate { index: usize, count: usize },

    #[error("node {node} action {action} is not part of the search tree")]
    NotInTree { node: usize, action: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} requires deterministic transitions")]
    RequiresDeterministic(&'static str),

    #[error("{0} requires an isotropic belief")]
    RequiresIsotropic(&'static str),

    #[error("covariance matrix is not positive semi-definite")]
    NotPositiveDefinite,

    #[error("MDP contains a cycle; only tree and DAG MDPs are supported")]
    Cyclic,

    #[error("horizon exhausted at a non-terminal state")]
    HorizonTooShort,

    #[error("illegal move")]
    IllegalMove,

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("unknown environment `{0}`")]
    UnknownEnvironment(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
