//! Starts the gateway in-process and drives it the way the browser client
//! does: register through an invitation code, practise over HTTP, then play
//! a two-player room over WebSockets until `game_end`.
//!
//! ```bash
//! cargo run -p queryarena-server --example headless_client
//! ```

use std::path::Path;
use std::sync::Arc;

use futures::{SinkExt, StreamExt};
use queryarena::registry::{read_questions, ProfileDetails, Registry, RegistryConfig, SystemClock};
use queryarena_server::AppState;
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;

type Socket =
    tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>;

struct Api {
    base: String,
    http: reqwest::Client,
}

impl Api {
    async fn post(&self, path: &str, token: Option<&str>, body: Value) -> Value {
        let mut req = self.http.post(format!("{}{path}", self.base)).json(&body);
        if let Some(t) = token {
            req = req.bearer_auth(t);
        }
        let resp = req.send().await.expect("request sent");
        let status = resp.status();
        let body: Value = resp.json().await.unwrap_or(Value::Null);
        println!("POST {path} -> {status}");
        body
    }
}

async fn next_event(ws: &mut Socket) -> Value {
    loop {
        match ws.next().await.expect("socket open").expect("frame") {
            Message::Text(t) => return serde_json::from_str(t.as_str()).expect("json event"),
            Message::Close(f) => panic!("closed: {f:?}"),
            _ => {}
        }
    }
}

async fn send(ws: &mut Socket, kind: &str, payload: Value) {
    let text = json!({"type": kind, "payload": payload}).to_string();
    ws.send(Message::text(text)).await.expect("send");
}

#[tokio::main]
async fn main() {
    let registry = Registry::in_memory(RegistryConfig::fast(), Arc::new(SystemClock));
    registry
        .create_admin("admin", "adminpass1", ProfileDetails::default())
        .expect("admin");
    let bank = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/questions.ndjson");
    registry
        .seed_questions(read_questions(&bank).expect("fixture bank"))
        .expect("seed");
    let state = AppState::new(Arc::new(registry));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
        .await
        .expect("bind");
    let addr = listener.local_addr().expect("addr");
    tokio::spawn(queryarena_server::serve(listener, state.clone()));

    let api = Api {
        base: format!("http://{addr}"),
        http: reqwest::Client::new(),
    };
    let admin = api
        .post(
            "/api/login",
            None,
            json!({"username": "admin", "password": "adminpass1"}),
        )
        .await["token"]
        .as_str()
        .expect("admin token")
        .to_string();

    let mut tokens = Vec::new();
    for name in ["ana", "ben"] {
        let code = api.post("/api/codes", Some(&admin), Value::Null).await;
        let body = json!({"username": name, "password": "password1", "code": code["code"]});
        let reg = api.post("/api/register", None, body).await;
        tokens.push(reg["token"].as_str().expect("token").to_string());
    }

    let rows = api
        .post(
            "/api/practice/query",
            Some(&tokens[0]),
            json!({"query": "SELECT name FROM ana_table ORDER BY id"}),
        )
        .await;
    println!(
        "practice result:\n{}\n",
        rows["serialized"].as_str().unwrap_or("-")
    );

    let room = api
        .post(
            "/api/rooms",
            Some(&tokens[0]),
            json!({"name": "lunch race"}),
        )
        .await;
    let room_id = room["id"].as_u64().expect("room id");

    let mut sockets = Vec::new();
    for token in &tokens {
        let url = format!("ws://{addr}/ws/rooms/{room_id}?token={token}");
        let (mut ws, _) = tokio_tungstenite::connect_async(url)
            .await
            .expect("connect");
        send(&mut ws, "join", json!({"as_spectator": false})).await;
        sockets.push(ws);
    }
    send(&mut sockets[0], "start", json!({"seed": 7})).await;

    // ana watches and prints; ben answers each round as it begins
    let mut ana = sockets.remove(0);
    let mut ben = sockets.remove(0);
    let answerer = tokio::spawn({
        let state = state.clone();
        async move {
            loop {
                let ev = next_event(&mut ben).await;
                match ev["type"].as_str() {
                    Some("round_begin") => {
                        let id = ev["payload"]["question_id"].as_u64().expect("question id") as u32;
                        let text = state
                            .registry
                            .question(id)
                            .expect("question")
                            .stored_answers[0]
                            .clone();
                        send(&mut ben, "answer", json!({"text": text})).await;
                    }
                    Some("game_end") => break,
                    _ => {}
                }
            }
        }
    });
    loop {
        let ev = next_event(&mut ana).await;
        println!(
            "ana <- #{} {} {}",
            ev["seq"],
            ev["type"].as_str().unwrap_or("?"),
            summary(&ev)
        );
        if ev["type"] == "game_end" {
            break;
        }
    }
    answerer.await.expect("answerer finished");
    // results are written off the room task; give the write a moment
    tokio::time::sleep(std::time::Duration::from_millis(100)).await;

    let profile: Value = api
        .http
        .get(format!("{}/api/profile/ben", api.base))
        .bearer_auth(&tokens[0])
        .send()
        .await
        .expect("profile")
        .json()
        .await
        .expect("profile json");
    println!("\nben's ratings: {}", profile["ratings"]);
}

fn summary(ev: &Value) -> String {
    let p = &ev["payload"];
    match ev["type"].as_str() {
        Some("round_begin") => format!("Q{}", p["question_id"]),
        Some("answer_result") => format!(
            "{} correct={}",
            p["player"].as_str().unwrap_or("?"),
            p["correct"]
        ),
        Some("game_end") => format!("champion {}", p["champion"].as_str().unwrap_or("?")),
        Some("joined") => p["user"].as_str().unwrap_or_default().to_string(),
        _ => String::new(),
    }
}
