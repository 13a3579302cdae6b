use std::env;

use serde::Serialize;

/// Environment variable overriding [`DEFAULT_ENUMERATION_LIMIT`].
pub const ENUMERATION_LIMIT_VAR: &str = "SYMBIOSIS_ENUMERATION_LIMIT";

/// Largest player count for which exact subset enumeration is attempted.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 20;

/// Raised when an exhaustive computation would enumerate too many coalitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{firms} firms exceeds the enumeration limit of {limit}; use the closed-form path")]
pub struct EnumerationLimitExceeded {
    pub firms: usize,
    pub limit: usize,
}

/// The enumeration limit, honouring [`ENUMERATION_LIMIT_VAR`] when it holds
/// a valid integer.
pub fn enumeration_limit() -> usize {
    env::var(ENUMERATION_LIMIT_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_LIMIT)
        .min(crate::games::MAX_PLAYERS)
}

pub(crate) fn ensure_within(firms: usize, limit: usize) -> Result<(), EnumerationLimitExceeded> {
    if firms > limit {
        Err(EnumerationLimitExceeded { firms, limit })
    } else {
        Ok(())
    }
}
