use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    LetterOutOfRange { index: i64, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("arity mismatch: word expects {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A configured resource cap was hit. `radius` is the last radius that
    /// was fully explored, when that is meaningful.
    #[error("{what} exceeded cap of {cap}{}", radius.map(|r| format!(" (complete through radius {r})")).unwrap_or_default())]
    CapExceeded {
        what: &'static str,
        cap: u64,
        radius: Option<usize>,
    },

    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("cayley table is not a latin square: {0}")]
    NotLatinSquare(String),

    #[error("permutation point {point} exceeds degree {degree}")]
    PermutationDegree { point: usize, degree: usize },

    #[error("marking is empty")]
    EmptyMarking,

    #[error("marking does not generate the group: reached {reached} of {order} elements")]
    NotGenerating { reached: u64, order: u64 },

    #[error("oracle self-check failed: {0}")]
    SelfCheck(String),

    #[error("operation requires a finite group, but {0} is infinite")]
    NotFinite(String),

    #[error("operation requires normal forms, which {0} does not provide")]
    NoNormalForm(String),

    #[error("witness map undefined at {0}")]
    IncompleteWitness(String),

    #[error("malformed witness: {0}")]
    MalformedWitness(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sequence has no limit")]
    NoLimit,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
