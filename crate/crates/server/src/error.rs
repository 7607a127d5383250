use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use queryarena::arena::ArenaError;
use queryarena::game::{GameError, PracticeError};
use queryarena::registry::RegistryError;
use serde::Serialize;

/// A failed request: the HTTP status plus the `{code, message}` body.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

#[derive(Serialize)]
struct Body<'a> {
    code: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn unauthorized(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "UNAUTHORIZED", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NOT_FOUND", message)
    }

    pub fn invalid(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            code: &self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<GameError> for ApiError {
    fn from(err: GameError) -> Self {
        let code = match &err {
            GameError::InsufficientBank { .. } => "INSUFFICIENT_BANK",
            GameError::InvalidMode(_) => "INVALID_MODE",
            GameError::AlreadySubmitted => "ALREADY_SUBMITTED",
            GameError::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            GameError::UnknownQuestionId(_) => return Self::not_found(err.to_string()),
        };
        Self::invalid(code, err.to_string())
    }
}

impl From<PracticeError> for ApiError {
    fn from(err: PracticeError) -> Self {
        match &err {
            PracticeError::Rejected(rej) => Self::invalid(rej.reason.as_str(), rej.detail.clone()),
            PracticeError::Exec(e) => Self::invalid(e.code(), e.to_string()),
        }
    }
}

impl From<ArenaError> for ApiError {
    fn from(err: ArenaError) -> Self {
        Self::invalid(err.code(), err.to_string())
    }
}

impl From<RegistryError> for ApiError {
    fn from(err: RegistryError) -> Self {
        use RegistryError as E;
        let msg = err.to_string();
        match err {
            E::BadCredentials => Self::new(StatusCode::UNAUTHORIZED, "BAD_CREDENTIALS", msg),
            E::NotAdmin => Self::new(StatusCode::FORBIDDEN, "FORBIDDEN", msg),
            E::UnknownUser(_) | E::UnknownLecture(_) | E::UnknownQuestionId(_) => {
                Self::not_found(msg)
            }
            E::BadCode => Self::invalid("BAD_CODE", msg),
            E::UsernameTaken => Self::invalid("USERNAME_TAKEN", msg),
            E::WeakPassword => Self::invalid("WEAK_PASSWORD", msg),
            E::InvalidUsername(_) => Self::invalid("INVALID_USERNAME", msg),
            E::InvalidMode(_) => Self::invalid("INVALID_MODE", msg),
            E::InvalidQuestion(_) => Self::invalid("INVALID_QUESTION", msg),
            E::DuplicateQuestionId(_) => Self::invalid("DUPLICATE_QUESTION_ID", msg),
            E::InvalidLecture(_) => Self::invalid("INVALID_LECTURE", msg),
            E::Practice(e) => e.into(),
            E::Game(e) => e.into(),
            E::CorruptLog { .. } | E::Io(_) => {
                tracing::error!(error = %msg, "storage failure");
                Self::new(
                    StatusCode::INTERNAL_SERVER_ERROR,
                    "STORAGE",
                    "storage failure",
                )
            }
        }
    }
}
