use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CtpError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// An event refers to a space-time point or path outside the sample space.
    #[error("constraint outside the domain: {0}")]
    ConstraintDomain(String),

    /// Contradictory event constraints.
    #[error("contradictory constraints: {0}")]
    Constraint(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {count} items over the limit of {limit}; {hint}")]
    Capacity {
        count: u128,
        limit: u128,
        hint: &'static str,
    },

    #[error("degenerate experiment: {0}")]
    Degenerate(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, CtpError>;
