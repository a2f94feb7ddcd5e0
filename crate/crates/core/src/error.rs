use thiserror::Error;

pub type Result<T> = std::result::Result<T, DsnError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DsnError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("cost {cost} on edge `{tail}` -> `{head}` exceeds 2^40")]
    CostOutOfRange { tail: String, head: String, cost: u64 },
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("{what} has size {actual}, above the limit of {limit}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("search budget of {0} steps exhausted")]
    SearchBudget(u64),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl DsnError {
    /// Process exit code used by the command line and the C interface.
    pub fn exit_code(&self) -> i32 {
        match self {
            DsnError::Infeasible(_) => 1,
            DsnError::Parse(_)
            | DsnError::UnknownVertex(_)
            | DsnError::DuplicateVertex(_)
            | DsnError::SelfLoop(_)
            | DsnError::DuplicateEdge(..)
            | DsnError::CostOutOfRange { .. }
            | DsnError::InvalidPattern(_) => 2,
            DsnError::SizeGuard { .. } | DsnError::SearchBudget(_) => 4,
            _ => 3,
        }
    }

    pub(crate) fn guard(what: &'static str, limit: usize, actual: usize) -> Result<()> {
        if actual > limit {
            Err(DsnError::SizeGuard { what, limit, actual })
        } else {
            Ok(())
        }
    }
}
