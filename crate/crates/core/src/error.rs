use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("{what}: dimension {dim} exceeds the enumeration bound {bound}")]
    BoundExceeded {
        what: &'static str,
        dim: usize,
        bound: usize,
    },

    #[error("malformed quadratic space: {0}")]
    MalformedSpace(String),

    #[error("quadratic space is degenerate: {0}")]
    Degenerate(String),

    #[error("not a morphism: {0}")]
    InvalidMorphism(String),

    #[error("objects do not match: {0}")]
    ObjectMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}
