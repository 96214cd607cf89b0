use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A malformed frame, argument or relation declaration.
    #[error("declaration error: {0}")]
    Declaration(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),
    /// An API call whose preconditions do not hold (frame mismatch, bad id, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// The observed evidence is unsatisfiable.
    #[error("inconsistent observations: {0}")]
    Evidence(String),
    /// `column` is 1-based and counted in characters.
    #[error("{column}: {message}")]
    Syntax { column: usize, message: String },
}

impl Error {
    pub(crate) fn syntax(column: usize, message: impl Into<String>) -> Self {
        Error::Syntax { column, message: message.into() }
    }
}
