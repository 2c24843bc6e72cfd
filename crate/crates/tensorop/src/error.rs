use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("bound exceeded: {what} = {value} > {max}")]
    Bound { what: &'static str, value: usize, max: usize },
    #[error("duplicate generator {0}")]
    DuplicateGenerator(u32),
    #[error("generator sets differ")]
    MismatchedGenerators,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("not a simplex")]
    NotASimplex,
    #[error("vertex {0} is not a normalized abelian word")]
    UnknownVertex(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("arithmetic budget exceeded")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
