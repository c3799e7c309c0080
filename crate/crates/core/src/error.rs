use std::io;

use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure surfaced by the library. Each variant carries a stable
/// machine-readable code (see [`Error::code`]) that the HTTP layer and the
/// CLI map onto statuses and exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("collector session is closed")]
    SessionClosed,
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("time order violated: {0}")]
    TimeOrder(String),
    #[error("request `{0}` cannot be received at its own location `{1}`")]
    SameLocation(String, String),
    #[error("request out `{0}` still has an open request in `{1}`")]
    ChildOpen(String, String),
    #[error("trace failed validation with {} error(s)", .0.errors.len())]
    Validation(Box<ValidationReport>),
    #[error("bad range: {0}")]
    BadRange(String),
    #[error("parent chain of `{0}` contains a cycle")]
    Cycle(String),
    #[error("bad filter expression: {0}")]
    BadRegex(#[from] regex::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed trace data at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("cannot listen on {0}")]
    Bind(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::SessionClosed => "E_SESSION_CLOSED",
            Error::UnknownId(_) => "E_UNKNOWN_ID",
            Error::TimeOrder(_) => "E_TIME_ORDER",
            Error::SameLocation(..) => "E_SAME_LOCATION",
            Error::ChildOpen(..) => "E_CHILD_OPEN",
            Error::Validation(_) => "E_VALIDATION",
            Error::BadRange(_) => "E_BAD_RANGE",
            Error::Cycle(_) => "E_CYCLE",
            Error::BadRegex(_) => "E_BAD_REGEX",
            Error::Config(_) => "E_CONFIG",
            Error::Parse { .. } => "E_PARSE",
            Error::BadRequest(_) => "E_BAD_REQUEST",
            Error::Bind(_) => "E_BIND",
            Error::Io(_) => "E_IO",
        }
    }

    pub(crate) fn time_order(msg: impl Into<String>) -> Self {
        Error::TimeOrder(msg.into())
    }
}
