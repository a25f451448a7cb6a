//! Error types shared across the crate.

use thiserror::Error;

/// Configuration parsing and validation failures. All variants carry enough
/// context to point the user at the offending line or key.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config line {line}: expected `key=value`, got `{text}`")]
    Malformed { line: usize, text: String },

    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("config line {line}: invalid value `{value}` for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },

    #[error("`{key}` out of range: {reason}")]
    OutOfRange { key: String, reason: String },
}

/// Runtime failures of the simulation layers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    /// A relay assignment was built for a different node set than the
    /// snapshot it is being flooded over.
    #[error("relay assignment covers {assignment_nodes} nodes, snapshot has {snapshot_nodes}")]
    AssignmentMismatch {
        assignment_nodes: usize,
        snapshot_nodes: usize,
    },

    /// Metrics normalize by n-1, so single-node scenarios are rejected.
    #[error("metric runs need at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    /// The pause time 0.75*R/u is undefined at zero speed; such scenarios
    /// must fix the loop count explicitly.
    #[error("pause time is undefined for zero speed; set `loops` explicitly")]
    ZeroSpeed,

    /// The exhaustive cover search scans 2^|candidates| subsets and is
    /// capped to keep that tractable.
    #[error("exhaustive cover search supports at most {limit} candidates, got {got}")]
    OracleTooLarge { got: usize, limit: usize },
}
