use std::time::{Duration, Instant};

use axum::extract::ws::{CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::response::Response;
use futures_util::{SinkExt, StreamExt};
use queryarena::arena::{MatchId, RoomCommand};
use serde::Deserialize;
use tokio::sync::mpsc;

use crate::rooms::{Frame, RoomMsg};
use crate::AppState;

pub const CLOSE_BAD_TOKEN: u16 = 4001;
pub const CLOSE_UNKNOWN_ROOM: u16 = 4004;
pub const CLOSE_PROTOCOL: u16 = 4009;

/// Client messages per second before the excess is refused.
pub const RATE_LIMIT: u32 = 10;

#[derive(Debug, Deserialize)]
pub struct TokenQuery {
    #[serde(default)]
    token: String,
}

#[derive(Debug, Deserialize)]
struct Envelope {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    payload: serde_json::Value,
}

#[derive(Debug, Default, Deserialize)]
struct JoinPayload {
    #[serde(default)]
    as_spectator: bool,
}

#[derive(Debug, Deserialize)]
struct ChatPayload {
    text: String,
}

#[derive(Debug, Default, Deserialize)]
struct StartPayload {
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
struct AnswerPayload {
    text: String,
    #[serde(default)]
    match_id: Option<MatchId>,
}

pub async fn room_socket(
    ws: WebSocketUpgrade,
    Path(room_id): Path<u64>,
    Query(q): Query<TokenQuery>,
    State(state): State<AppState>,
) -> Response {
    ws.on_upgrade(move |socket| session(socket, state, room_id, q.token))
}

async fn close(mut socket: WebSocket, code: u16, reason: &str) {
    let frame = CloseFrame {
        code,
        reason: reason.into(),
    };
    let _ = socket.send(Message::Close(Some(frame))).await;
}

fn payload<T: for<'de> Deserialize<'de> + Default>(v: serde_json::Value) -> Result<T, String> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v).map_err(|e| e.to_string())
}

/// Turns one client message into a room command, or an error for the client.
fn command(user: &str, env: Envelope) -> Result<RoomCommand, (&'static str, String)> {
    let user = user.to_string();
    let bad = |e: String| ("BAD_PAYLOAD", e);
    Ok(match env.kind.as_str() {
        "join" => {
            let p: JoinPayload = payload(env.payload).map_err(bad)?;
            RoomCommand::Join {
                user,
                as_spectator: p.as_spectator,
            }
        }
        "leave" => RoomCommand::Leave { user },
        "chat" => {
            let p: ChatPayload =
                serde_json::from_value(env.payload).map_err(|e| bad(e.to_string()))?;
            RoomCommand::Chat { user, text: p.text }
        }
        "start" => {
            let p: StartPayload = payload(env.payload).map_err(bad)?;
            RoomCommand::Start {
                user,
                seed: p.seed.unwrap_or_else(rand::random),
            }
        }
        "answer" => {
            let p: AnswerPayload =
                serde_json::from_value(env.payload).map_err(|e| bad(e.to_string()))?;
            RoomCommand::Answer {
                user,
                text: p.text,
                match_id: p.match_id,
            }
        }
        other => return Err(("UNKNOWN_TYPE", format!("unknown message type '{other}'"))),
    })
}

async fn session(socket: WebSocket, state: AppState, room_id: u64, token: String) {
    let now = state.registry.clock().now();
    let Some(session) = state.sessions.resolve(&token, now) else {
        return close(socket, CLOSE_BAD_TOKEN, "invalid or expired token").await;
    };
    let Some(room) = state.rooms.sender(room_id) else {
        return close(socket, CLOSE_UNKNOWN_ROOM, "unknown room").await;
    };
    let user = session.username;
    let conn = state.rooms.next_conn();
    let (tx, mut rx) = mpsc::unbounded_channel::<Frame>();
    if room
        .send(RoomMsg::Connect {
            conn,
            user: user.clone(),
            tx: tx.clone(),
        })
        .is_err()
    {
        return close(socket, CLOSE_UNKNOWN_ROOM, "room closed").await;
    }
    tracing::debug!(room = room_id, user, conn, "socket connected");

    let (mut sink, mut stream) = socket.split();
    let writer = tokio::spawn(async move {
        while let Some(frame) = rx.recv().await {
            let msg = match frame {
                Frame::Text(t) => Message::Text((*t).into()),
                Frame::Close(code, reason) => {
                    let frame = CloseFrame {
                        code,
                        reason: reason.into(),
                    };
                    let _ = sink.send(Message::Close(Some(frame))).await;
                    break;
                }
            };
            if sink.send(msg).await.is_err() {
                break;
            }
        }
    });

    let mut window = Instant::now();
    let mut count = 0u32;
    while let Some(Ok(msg)) = stream.next().await {
        let text = match msg {
            Message::Text(t) => t,
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
            Message::Binary(_) => {
                let _ = tx.send(Frame::Close(
                    CLOSE_PROTOCOL,
                    "binary frames are not supported".into(),
                ));
                break;
            }
        };
        if window.elapsed() >= Duration::from_secs(1) {
            window = Instant::now();
            count = 0;
        }
        count += 1;
        let reject = |code: &str, message: String| RoomMsg::Reject {
            user: user.clone(),
            code: code.to_string(),
            message,
        };
        if count > RATE_LIMIT {
            let _ = room.send(reject(
                "RATE_LIMITED",
                format!("more than {RATE_LIMIT} messages per second"),
            ));
            continue;
        }
        let env: Envelope = match serde_json::from_str(text.as_str()) {
            Ok(env) => env,
            Err(e) => {
                let _ = tx.send(Frame::Close(
                    CLOSE_PROTOCOL,
                    format!("malformed message: {e}"),
                ));
                break;
            }
        };
        let msg = match command(&user, env) {
            Ok(cmd) => RoomMsg::Command(cmd),
            Err((code, message)) => reject(code, message),
        };
        if room.send(msg).is_err() {
            break;
        }
    }
    let _ = room.send(RoomMsg::Disconnect {
        conn,
        user: user.clone(),
    });
    drop(tx);
    let _ = writer.await;
    tracing::debug!(room = room_id, user, conn, "socket closed");
}
