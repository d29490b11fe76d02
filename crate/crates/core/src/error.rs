use thiserror::Error;

use crate::edge::TargetRef;

/// Errors raised by metagraph operations.
///
/// Structural violations found by [`crate::tmg::Tmg::validate`] are reported
/// as data, not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MgError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("type declaration error: {0}")]
    TypeDecl(String),
    #[error("partition error: missing [{}], duplicated [{}], foreign [{}]", refs(missing), refs(duplicated), refs(foreign))]
    Partition {
        missing: Vec<TargetRef>,
        duplicated: Vec<TargetRef>,
        foreign: Vec<TargetRef>,
    },
    #[error("index {index} out of range (limit {limit}) in {context}")]
    Range {
        context: String,
        index: usize,
        limit: usize,
    },
    #[error("incomparable types `{0}` and `{1}`")]
    TypeMismatch(String, String),
    #[error("invalid crf: {0}")]
    Crf(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("size mismatch: {0}")]
    Size(String),
    #[error("routing failed: {0}")]
    Route(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("unfold did not decrease its measure at seed {0}")]
    Divergence(String),
    #[error("not constructible from the constructor algebra: {0}")]
    NotConstructible(String),
    #[error("open sets belong to different hosts")]
    Host,
    #[error("mapping error: {0}")]
    Mapping(String),
    #[error("smoothness error: {0}")]
    Smoothness(String),
    #[error("not applicable: {0}")]
    Applicability(String),
    #[error("weight error: {0}")]
    Weight(String),
    #[error("virtual membership rejected: {0}")]
    Membership(String),
    #[error("state error: {0}")]
    State(String),
    #[error("trace error: {0}")]
    Trace(String),
    #[error("handler failed: {0}")]
    Handler(String),
    #[error("at {path}: {source}")]
    Fold { path: String, source: Box<MgError> },
    #[error("trace {index}: {source}")]
    InTrace { index: usize, source: Box<MgError> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = MgError> = std::result::Result<T, E>;

fn refs(list: &[TargetRef]) -> String {
    list.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
