use thiserror::Error;

/// Errors found while reading or validating source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StaticError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("undeclared variable `{0}`")]
    Undeclared(String),
    #[error("variable `{0}` declared twice")]
    DuplicateDecl(String),
    #[error("variable `{name}` has an empty domain {lo}..{hi}")]
    EmptyDomain { name: String, lo: i64, hi: i64 },
    #[error("type error: {0}")]
    Type(String),
}

/// A configured size bound was exceeded.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResourceError {
    #[error("state space has {size} states, over the cap of {cap}")]
    StateCap { size: u128, cap: usize },
    #[error("trace set has more than {cap} traces")]
    TraceSetCap { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Static(#[from] StaticError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("assignment `{target} := {value}` at {label} leaves the domain of `{target}` from state {state}")]
    OutOfDomain {
        target: String,
        value: String,
        label: String,
        state: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("program has no `until` loop")]
    NoLoop,
    #[error("internal consistency violation: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
