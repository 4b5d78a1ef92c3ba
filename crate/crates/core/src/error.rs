use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("line {line}: timestamp regression on tid {tid} ({previous} -> {current})")]
    TimestampRegression {
        line: usize,
        tid: u32,
        previous: u64,
        current: u64,
    },

    #[error("tid {tid}, event {index}: exit of `{method}` does not match an open frame")]
    OrphanExit {
        tid: u32,
        index: usize,
        method: String,
    },

    #[error("tid {tid}: {open} frame(s) still open at end of stream (innermost `{method}`)")]
    UnmatchedEnter {
        tid: u32,
        open: usize,
        method: String,
    },

    #[error("invalid method name {0:?}")]
    InvalidMethodName(String),

    #[error("invalid filter pattern {pattern:?}: {reason}")]
    InvalidPattern { pattern: String, reason: String },

    #[error("filter pattern {0:?} would remove the synthetic root")]
    RootFiltered(String),

    #[error("average per invocation needs at least one invocation")]
    ZeroInvocations,

    #[error("catalog line {line}: {reason}")]
    Catalog { line: usize, reason: String },

    #[error("unknown use case `{0}`")]
    UnknownUseCase(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid workload: {0}")]
    Workload(String),

    #[error("snapshot schema mismatch: expected `{expected}`, found `{found}`")]
    SchemaMismatch { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
