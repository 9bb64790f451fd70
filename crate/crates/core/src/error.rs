use std::path::PathBuf;

use crate::vpart::Alpha;
use crate::BigNat;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input too large: {what} = {value} exceeds the limit {limit}")]
    InputTooLarge {
        what: &'static str,
        value: String,
        limit: String,
    },
    #[error("exponent signature is undefined for n = 1")]
    UndefinedForOne,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("could not certify the result at the {cap}-bit precision cap")]
    PrecisionExhausted { cap: u32 },
    #[error("search budget exceeded after {explored} nodes")]
    BudgetExceeded { explored: usize },
    #[error("input is incomplete (produced by a search that ran out of budget)")]
    IncompleteInput,
    #[error("{}:{line}: {reason}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<cache>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        reason: String,
    },
    #[error("unsupported cache header {found:?} (expected \"VPCACHE v1\")")]
    VersionMismatch { found: String },
    #[error("conflicting cache values for ({key}): {left} vs {right}")]
    Conflict {
        key: Alpha,
        left: BigNat,
        right: BigNat,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn too_large(
        what: &'static str,
        value: impl ToString,
        limit: impl ToString,
    ) -> Self {
        Error::InputTooLarge {
            what,
            value: value.to_string(),
            limit: limit.to_string(),
        }
    }
}
