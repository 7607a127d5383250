use std::collections::HashMap;

use axum::extract::FromRequestParts;
use axum::http::header::AUTHORIZATION;
use axum::http::request::Parts;
use chrono::{DateTime, Duration, Utc};
use parking_lot::Mutex;
use queryarena::registry::Role;
use rand::RngCore;

use crate::error::ApiError;
use crate::AppState;

pub const TOKEN_BYTES: usize = 32;
pub const TOKEN_TTL_HOURS: i64 = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub username: String,
    pub role: Role,
    pub expires_at: DateTime<Utc>,
}

/// Bearer tokens held in memory. A restart logs everyone out.
#[derive(Debug, Default)]
pub struct Sessions {
    tokens: Mutex<HashMap<String, Session>>,
}

impl Sessions {
    pub fn issue(&self, username: &str, role: Role, now: DateTime<Utc>) -> (String, Session) {
        let mut bytes = [0u8; TOKEN_BYTES];
        rand::rng().fill_bytes(&mut bytes);
        let token = hex::encode(bytes);
        let session = Session {
            username: username.to_string(),
            role,
            expires_at: now + Duration::hours(TOKEN_TTL_HOURS),
        };
        let mut tokens = self.tokens.lock();
        tokens.retain(|_, s| s.expires_at > now);
        tokens.insert(token.clone(), session.clone());
        (token, session)
    }

    pub fn resolve(&self, token: &str, now: DateTime<Utc>) -> Option<Session> {
        let mut tokens = self.tokens.lock();
        match tokens.get(token) {
            Some(s) if s.expires_at > now => Some(s.clone()),
            Some(_) => {
                tokens.remove(token);
                None
            }
            None => None,
        }
    }

    pub fn revoke(&self, token: &str) {
        self.tokens.lock().remove(token);
    }
}

/// The caller behind a valid `Authorization: Bearer` token.
#[derive(Debug, Clone)]
pub struct AuthUser {
    pub token: String,
    pub session: Session,
}

impl AuthUser {
    pub fn username(&self) -> &str {
        &self.session.username
    }
}

impl FromRequestParts<AppState> for AuthUser {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        let header = parts
            .headers
            .get(AUTHORIZATION)
            .and_then(|h| h.to_str().ok())
            .ok_or_else(|| ApiError::unauthorized("missing bearer token"))?;
        let token = header
            .strip_prefix("Bearer ")
            .ok_or_else(|| ApiError::unauthorized("malformed authorization header"))?
            .trim();
        let session = state
            .sessions
            .resolve(token, state.registry.clock().now())
            .ok_or_else(|| ApiError::unauthorized("invalid or expired token"))?;
        Ok(Self {
            token: token.to_string(),
            session,
        })
    }
}

#[cfg(test)]
mod tests {
    use chrono::TimeZone;

    use super::*;

    #[test]
    fn tokens_resolve_until_expiry() {
        let sessions = Sessions::default();
        let t0 = Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap();
        let (token, _) = sessions.issue("ana", Role::Student, t0);
        assert_eq!(token.len(), TOKEN_BYTES * 2);
        assert_eq!(sessions.resolve(&token, t0).unwrap().username, "ana");
        let late = t0 + Duration::hours(TOKEN_TTL_HOURS);
        assert!(sessions.resolve(&token, late).is_none());
        // expired entries are gone, not just hidden
        assert!(sessions.resolve(&token, t0).is_none());
    }

    #[test]
    fn revoke_and_distinct_tokens() {
        let sessions = Sessions::default();
        let now = Utc::now();
        let (a, _) = sessions.issue("ana", Role::Student, now);
        let (b, _) = sessions.issue("ana", Role::Student, now);
        assert_ne!(a, b);
        sessions.revoke(&a);
        assert!(sessions.resolve(&a, now).is_none());
        assert!(sessions.resolve(&b, now).is_some());
    }
}
