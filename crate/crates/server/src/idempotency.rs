use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use axum::body::{to_bytes, Body, Bytes};
use axum::extract::{Request, State};
use axum::http::{HeaderMap, Method, StatusCode};
use axum::middleware::Next;
use axum::response::{IntoResponse, Response};
use parking_lot::Mutex;

use crate::error::ApiError;
use crate::AppState;

pub const HEADER: &str = "idempotency-key";
const MAX_ENTRIES: usize = 10_000;
const MAX_BODY: usize = 4 << 20;

#[derive(Debug, Clone)]
struct Stored {
    status: StatusCode,
    headers: HeaderMap,
    body: Bytes,
}

type Slot = Arc<tokio::sync::Mutex<Option<Stored>>>;

/// Responses to state-changing requests, keyed by caller, route and the
/// client's `Idempotency-Key`. A retry gets the first response back. The
/// per-key lock makes a concurrent retry wait for the first attempt.
#[derive(Debug, Default)]
pub struct IdempotencyCache {
    slots: Mutex<(HashMap<String, Slot>, VecDeque<String>)>,
}

impl IdempotencyCache {
    fn slot(&self, key: &str) -> Slot {
        let mut guard = self.slots.lock();
        let (map, order) = &mut *guard;
        if let Some(s) = map.get(key) {
            return s.clone();
        }
        if order.len() >= MAX_ENTRIES {
            if let Some(old) = order.pop_front() {
                map.remove(&old);
            }
        }
        let s = Slot::default();
        map.insert(key.to_string(), s.clone());
        order.push_back(key.to_string());
        s
    }
}

pub async fn middleware(State(state): State<AppState>, req: Request, next: Next) -> Response {
    let changes_state = matches!(*req.method(), Method::POST | Method::PUT | Method::DELETE);
    let key = req.headers().get(HEADER).and_then(|v| v.to_str().ok());
    let (true, Some(key)) = (changes_state, key) else {
        return next.run(req).await;
    };
    let caller = req
        .headers()
        .get(axum::http::header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("");
    let full_key = format!("{caller}\n{}\n{}\n{key}", req.method(), req.uri().path());
    let slot = state.idempotency.slot(&full_key);
    let mut stored = slot.lock().await;
    if let Some(s) = stored.as_ref() {
        tracing::debug!(path = %req.uri().path(), "idempotent replay");
        let mut resp = Response::new(Body::from(s.body.clone()));
        *resp.status_mut() = s.status;
        *resp.headers_mut() = s.headers.clone();
        return resp;
    }
    let resp = next.run(req).await;
    let (parts, body) = resp.into_parts();
    let body = match to_bytes(body, MAX_BODY).await {
        Ok(b) => b,
        Err(_) => {
            return ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "INTERNAL",
                "response too large",
            )
            .into_response()
        }
    };
    if !parts.status.is_server_error() {
        *stored = Some(Stored {
            status: parts.status,
            headers: parts.headers.clone(),
            body: body.clone(),
        });
    }
    Response::from_parts(parts, Body::from(body))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_slot() {
        let cache = IdempotencyCache::default();
        let a = cache.slot("k1");
        assert!(Arc::ptr_eq(&a, &cache.slot("k1")));
        assert!(!Arc::ptr_eq(&a, &cache.slot("k2")));
    }

    #[test]
    fn oldest_key_evicted_at_capacity() {
        let cache = IdempotencyCache::default();
        let first = cache.slot("k0");
        for i in 1..=MAX_ENTRIES {
            cache.slot(&format!("k{i}"));
        }
        assert!(!Arc::ptr_eq(&first, &cache.slot("k0")));
        assert!(cache.slots.lock().0.len() <= MAX_ENTRIES);
    }
}
