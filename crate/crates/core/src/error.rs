use thiserror::Error;

/// Errors raised by the library. Verification failures are not errors; they
/// are recorded inside reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("variable x{index} exceeds declared dimension {nvars}")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("evaluation is singular at subexpression `{0}`")]
    Singular(String),

    #[error("no nonsingular sample point found after {0} attempts")]
    Sampling(usize),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("ansatz of {count} monomials exceeds cap of {cap}")]
    AnsatzCap { count: usize, cap: usize },

    #[error("constraint violation: parameter `{name}` = {value} must be {constraint}")]
    Constraint {
        name: String,
        value: String,
        constraint: String,
    },

    #[error("catalog line {line}: {msg}")]
    Catalog { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
