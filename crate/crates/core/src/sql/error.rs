use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset} near '{token}': {message}")]
    Syntax {
        offset: usize,
        token: String,
        message: String,
    },
    #[error("only one statement is accepted; found another after ';' at byte {offset}")]
    MultiStatement { offset: usize },
    #[error("{feature} is not supported (byte {offset})")]
    Unsupported { offset: usize, feature: String },
    #[error("empty query")]
    Empty,
}

impl ParseError {
    pub(crate) fn syntax(offset: usize, token: &str, message: &str) -> Self {
        ParseError::Syntax {
            offset,
            token: token.to_string(),
            message: message.to_string(),
        }
    }

    pub(crate) fn unsupported(offset: usize, feature: impl Into<String>) -> Self {
        ParseError::Unsupported {
            offset,
            feature: feature.into(),
        }
    }

    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::MultiStatement { offset }
            | ParseError::Unsupported { offset, .. } => *offset,
            ParseError::Empty => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("unknown table '{0}'")]
    UnknownTable(String),
    #[error("unknown column '{column}' in table '{table}'")]
    UnknownColumn { table: String, column: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("table '{0}' already exists")]
    DuplicateTable(String),
    #[error("duplicate column '{0}'")]
    DuplicateColumn(String),
    #[error("expected {expected} values per row, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("{0} cannot be executed")]
    Unsupported(String),
}

impl ExecError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            ExecError::UnknownTable(_) => "UNKNOWN_TABLE",
            ExecError::UnknownColumn { .. } => "UNKNOWN_COLUMN",
            ExecError::TypeMismatch(_) => "TYPE_MISMATCH",
            ExecError::DuplicateTable(_) => "DUPLICATE_TABLE",
            ExecError::DuplicateColumn(_) => "DUPLICATE_COLUMN",
            ExecError::ArityMismatch { .. } => "ARITY_MISMATCH",
            ExecError::ResourceLimit(_) => "RESOURCE_LIMIT",
            ExecError::InvalidSchema(_) => "INVALID_SCHEMA",
            ExecError::Unsupported(_) => "UNSUPPORTED",
        }
    }
}
