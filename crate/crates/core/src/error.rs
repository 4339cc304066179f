use thiserror::Error;

/// Errors raised by the engine. Parse and validation problems are kept
/// separate from certificate-engine failures so front ends can map them to
/// distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid scalar: {0}")]
    Scalar(String),

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid presentation: {0}")]
    Presentation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degree-0 part not certified: {0}")]
    Admissibility(String),

    #[error("truncation too large: {0}")]
    Explosion(String),

    #[error("structure constants not associative at basis triple {0}")]
    NotAssociative(String),

    #[error("idempotent axioms violated: {0}")]
    Idempotents(String),

    #[error("module error: {0}")]
    Module(String),

    #[error("window exhausted: {0}")]
    Window(String),

    #[error("lifting system inconsistent: {0}")]
    Lifting(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("malformed structure-constant document: {0}")]
    Import(String),
}

impl Error {
    /// True for errors caused by the input document rather than by the engine.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidField(_) | Error::Scalar(_) | Error::Syntax { .. } | Error::Presentation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
