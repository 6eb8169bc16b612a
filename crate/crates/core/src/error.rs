use thiserror::Error;

/// Errors raised by the algebraic and numerical routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown label `{label}` at offset {offset}")]
    UnknownLabel { label: String, offset: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("expected an element of the pre-Lie algebra (single-tree forests only), found `{0}`")]
    NotPrimitive(String),
    #[error("expected counit {expected}, found {found}")]
    Counit { expected: String, found: String },
    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("malformed JSON: {0}")]
    Json(String),
}

impl Error {
    /// Whether the error stems from malformed textual input rather than from
    /// a domain condition.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::UnknownLabel { .. } | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
