use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("empty input to {0}")]
    Empty(&'static str),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed rational {0:?}")]
    ParseRat(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("stack underflow")]
    StackUnderflow,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            context: context.to_string(),
            expected,
            found,
        })
    }
}
