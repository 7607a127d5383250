//! HTTP and WebSocket gateway for the `queryarena` engine.
//!
//! [`router`] builds the full route table; [`serve`] runs it on a listener.
//! Every route except register and login needs an
//! `Authorization: Bearer <token>` header; the room socket takes the token
//! as a `token` query parameter. Errors are JSON `{code, message}`.

pub mod api;
pub mod auth;
pub mod error;
pub mod idempotency;
pub mod rooms;
pub mod solo;
pub mod ws;

use std::sync::Arc;

use axum::routing::{get, post, put};
use axum::Router;
use queryarena::registry::Registry;

pub use error::ApiError;

/// Shared server state. Cheap to clone.
#[derive(Debug, Clone)]
pub struct AppState {
    pub registry: Arc<Registry>,
    pub sessions: Arc<auth::Sessions>,
    pub solo: Arc<solo::SoloStore>,
    pub rooms: Arc<rooms::RoomHub>,
    pub idempotency: Arc<idempotency::IdempotencyCache>,
}

impl AppState {
    pub fn new(registry: Arc<Registry>) -> Self {
        Self {
            rooms: Arc::new(rooms::RoomHub::new(registry.clone())),
            registry,
            sessions: Arc::default(),
            solo: Arc::default(),
            idempotency: Arc::default(),
        }
    }
}

pub fn router(state: AppState) -> Router {
    use api::*;
    Router::new()
        .route("/api/register", post(register))
        .route("/api/login", post(login))
        .route("/api/logout", post(logout))
        .route("/api/me", get(me))
        .route("/api/codes", post(issue_code))
        .route("/api/profile/{username}", get(profile))
        .route("/api/profiles", get(search_profiles))
        .route("/api/rankings/{mode}", get(rankings))
        .route("/api/lectures", get(list_lectures).post(create_lecture))
        .route("/api/lectures/{id}", get(get_lecture).put(update_lecture))
        .route("/api/questions", get(list_questions).post(add_question))
        .route(
            "/api/questions/{id}",
            put(edit_question).delete(delete_question),
        )
        .route("/api/solo", post(start_solo))
        .route("/api/solo/{id}", get(get_solo))
        .route("/api/solo/{id}/answer", post(solo_answer))
        .route("/api/solo/{id}/skip", post(solo_skip))
        .route("/api/solo/{id}/submit", post(solo_submit))
        .route("/api/practice/query", post(practice_query))
        .route("/api/practice/table", get(practice_table))
        .route("/api/practice/reset", post(practice_reset))
        .route("/api/rooms", get(list_rooms).post(create_room))
        .route("/api/rooms/{id}", get(get_room))
        .route("/ws/rooms/{id}", get(ws::room_socket))
        .layer(axum::middleware::from_fn_with_state(
            state.clone(),
            idempotency::middleware,
        ))
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr().ok(), "gateway listening");
    axum::serve(listener, router(state)).await
}
