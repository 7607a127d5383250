#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use queryarena::registry::{ProfileDetails, Registry, RegistryConfig, SystemClock};
use queryarena_server::AppState;
use reqwest::{Method, StatusCode};
use serde_json::{json, Value};
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

pub const ADMIN: &str = "admin";
pub const ADMIN_PASSWORD: &str = "adminpass1";

pub struct Server {
    pub addr: SocketAddr,
    pub http: reqwest::Client,
    pub state: AppState,
}

pub async fn spawn() -> Server {
    let registry = Registry::in_memory(RegistryConfig::fast(), Arc::new(SystemClock));
    registry
        .create_admin(ADMIN, ADMIN_PASSWORD, ProfileDetails::default())
        .unwrap();
    registry
        .seed_questions(queryarena::testkit::load_bank_specs())
        .unwrap();
    let state = AppState::new(Arc::new(registry));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(queryarena_server::serve(listener, state.clone()));
    Server {
        addr,
        http: reqwest::Client::new(),
        state,
    }
}

impl Server {
    pub async fn call(
        &self,
        method: Method,
        path: &str,
        token: Option<&str>,
        body: Option<Value>,
    ) -> (StatusCode, Value) {
        self.call_with(method, path, token, body, None).await
    }

    pub async fn call_with(
        &self,
        method: Method,
        path: &str,
        token: Option<&str>,
        body: Option<Value>,
        idempotency_key: Option<&str>,
    ) -> (StatusCode, Value) {
        let mut req = self
            .http
            .request(method, format!("http://{}{path}", self.addr));
        if let Some(t) = token {
            req = req.bearer_auth(t);
        }
        if let Some(k) = idempotency_key {
            req = req.header("Idempotency-Key", k);
        }
        if let Some(b) = body {
            req = req.json(&b);
        }
        let resp = req.send().await.unwrap();
        let status = resp.status();
        let text = resp.text().await.unwrap();
        let value = if text.is_empty() {
            Value::Null
        } else {
            serde_json::from_str(&text).unwrap()
        };
        (status, value)
    }

    pub async fn login(&self, user: &str, password: &str) -> String {
        let (status, body) = self
            .call(
                Method::POST,
                "/api/login",
                None,
                Some(json!({"username": user, "password": password})),
            )
            .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        body["token"].as_str().unwrap().to_string()
    }

    pub async fn admin_token(&self) -> String {
        self.login(ADMIN, ADMIN_PASSWORD).await
    }

    /// Registers a student through an admin-issued code; returns its token.
    pub async fn student(&self, admin_token: &str, username: &str) -> String {
        let (status, code) = self
            .call(Method::POST, "/api/codes", Some(admin_token), None)
            .await;
        assert_eq!(status, StatusCode::CREATED, "{code}");
        let (status, body) = self
            .call(
                Method::POST,
                "/api/register",
                None,
                Some(json!({
                    "username": username,
                    "password": "password1",
                    "code": code["code"],
                    "name": username,
                })),
            )
            .await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body["token"].as_str().unwrap().to_string()
    }

    pub async fn socket(&self, room: u64, token: &str) -> Client {
        let url = format!("ws://{}/ws/rooms/{room}?token={token}", self.addr);
        let (ws, _) = tokio_tungstenite::connect_async(url).await.unwrap();
        Client { ws, last_seq: 0 }
    }
}

pub struct Client {
    pub ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
    pub last_seq: u64,
}

impl Client {
    pub async fn send(&mut self, kind: &str, payload: Value) {
        let text = json!({"type": kind, "payload": payload}).to_string();
        self.ws.send(Message::text(text)).await.unwrap();
    }

    /// Next server message; panics after 5 s. Checks that seq increases.
    pub async fn recv(&mut self) -> Value {
        loop {
            let msg = tokio::time::timeout(Duration::from_secs(5), self.ws.next())
                .await
                .expect("timed out waiting for a message")
                .expect("socket ended")
                .unwrap();
            match msg {
                Message::Text(t) => {
                    let v: Value = serde_json::from_str(t.as_str()).unwrap();
                    let seq = v["seq"].as_u64().unwrap();
                    assert!(
                        seq > self.last_seq,
                        "seq went from {} to {seq}",
                        self.last_seq
                    );
                    self.last_seq = seq;
                    return v;
                }
                Message::Close(frame) => panic!("socket closed: {frame:?}"),
                _ => continue,
            }
        }
    }

    /// Skips messages until one of type `kind` arrives.
    pub async fn expect(&mut self, kind: &str) -> Value {
        loop {
            let v = self.recv().await;
            if v["type"] == kind {
                return v;
            }
        }
    }

    /// Waits for the close frame and returns its code.
    pub async fn close_code(&mut self) -> u16 {
        loop {
            match tokio::time::timeout(Duration::from_secs(5), self.ws.next()).await {
                Ok(Some(Ok(Message::Close(Some(frame))))) => return frame.code.into(),
                Ok(Some(Ok(_))) => continue,
                other => panic!("expected close frame, got {other:?}"),
            }
        }
    }
}

/// Stored answer for question `id` in the fixture bank.
pub fn answer_for(state: &AppState, id: u32) -> String {
    state.registry.question(id).unwrap().stored_answers[0].clone()
}
