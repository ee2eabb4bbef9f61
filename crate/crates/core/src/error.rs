use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dense realization of {qubits} qubits exceeds the cap of {cap}")]
    ResourceLimit { qubits: usize, cap: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(
        "cannot complete eigenvalue set: {missing} values missing, at most one can be recovered"
    )]
    CannotComplete { missing: usize },

    #[error("{}", fmt_parse(.line, .field, .message))]
    Parse {
        line: Option<usize>,
        field: String,
        message: String,
    },

    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}

fn fmt_parse(line: &Option<usize>, field: &str, message: &str) -> String {
    match (line, field.is_empty()) {
        (Some(l), false) => format!("parse error at line {l}, field `{field}`: {message}"),
        (Some(l), true) => format!("parse error at line {l}: {message}"),
        (None, false) => format!("parse error in field `{field}`: {message}"),
        (None, true) => format!("parse error: {message}"),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
