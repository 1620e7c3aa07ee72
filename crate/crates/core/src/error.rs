use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate edge ({agent}, {house})")]
    DuplicateEdge { agent: String, house: String },
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown agent {0}")]
    UnknownAgent(String),
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: i64 },
    #[error("pair ({agent}, {house}) is not an edge of the instance")]
    NonEdge { agent: String, house: String },
    #[error("capacity exceeded at {0}")]
    CapacityExceeded(String),
    #[error("pair ({agent}, {house}) listed twice")]
    DuplicatePair { agent: String, house: String },
    #[error("signature length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("edge ({agent}, {house}) is not incident to agent {expected}")]
    NotIncident {
        agent: String,
        house: String,
        expected: String,
    },
    #[error("enumeration budget exceeded: bound {bound} > budget {budget}")]
    BudgetExceeded { bound: u128, budget: u128 },
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("discrepancy: {0}")]
    Discrepancy(String),
}

pub type Result<T> = std::result::Result<T, Error>;
