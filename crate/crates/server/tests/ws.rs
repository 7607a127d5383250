mod common;

use common::{answer_for, spawn, Client};
use queryarena_server::ws::{CLOSE_BAD_TOKEN, CLOSE_PROTOCOL, CLOSE_UNKNOWN_ROOM};
use reqwest::{Method, StatusCode};
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;

async fn room(s: &common::Server, token: &str) -> u64 {
    let (status, body) = s
        .call(
            Method::POST,
            "/api/rooms",
            Some(token),
            Some(json!({"name": "Lab 3"})),
        )
        .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["id"].as_u64().unwrap()
}

async fn join(c: &mut Client, spectator: bool) -> Value {
    c.send("join", json!({"as_spectator": spectator})).await;
    c.expect("joined").await
}

#[tokio::test]
async fn close_codes() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let id = room(&s, &admin).await;

    let mut c = s.socket(id, "nope").await;
    assert_eq!(c.close_code().await, CLOSE_BAD_TOKEN);
    let mut c = s.socket(999, &admin).await;
    assert_eq!(c.close_code().await, CLOSE_UNKNOWN_ROOM);
    let mut c = s.socket(id, &admin).await;
    use futures::SinkExt;
    c.ws.send(Message::text("not json")).await.unwrap();
    assert_eq!(c.close_code().await, CLOSE_PROTOCOL);
}

#[tokio::test]
async fn gates_keep_connection_open() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let ana = s.student(&admin, "ana").await;
    let cyd = s.student(&admin, "cyd").await;
    let id = room(&s, &admin).await;

    let mut a = s.socket(id, &ana).await;
    join(&mut a, false).await;
    a.send("start", json!({})).await;
    let err = a.expect("error").await;
    assert_eq!(err["payload"]["code"], "NOT_CREATOR");

    let mut c = s.socket(id, &cyd).await;
    join(&mut c, true).await;
    c.expect("spectate_state").await;
    c.send("answer", json!({"text": "SELECT 1"})).await;
    assert_eq!(
        c.expect("error").await["payload"]["code"],
        "GAME_NOT_RUNNING"
    );
    c.send("dance", json!({})).await;
    assert_eq!(c.expect("error").await["payload"]["code"], "UNKNOWN_TYPE");
    c.send("chat", json!({"text": "still here"})).await;
    let chat = c.expect("chat_broadcast").await;
    assert_eq!(chat["payload"]["text"], "still here");
    assert_eq!(a.expect("chat_broadcast").await["payload"]["user"], "cyd");
}

#[tokio::test]
async fn rate_limit() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let id = room(&s, &admin).await;
    let mut a = s.socket(id, &admin).await;
    for i in 0..12 {
        a.send("chat", json!({"text": format!("m{i}")})).await;
    }
    let mut codes = Vec::new();
    for _ in 0..12 {
        let v = a.recv().await;
        if v["type"] == "error" {
            codes.push(v["payload"]["code"].as_str().unwrap().to_string());
        }
    }
    assert_eq!(codes, ["RATE_LIMITED", "RATE_LIMITED"]);
}

/// Two players race the same question; a spectator watches to game_end.
#[tokio::test]
async fn two_player_match_to_game_end() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let ana = s.student(&admin, "ana").await;
    let ben = s.student(&admin, "ben").await;
    let cyd = s.student(&admin, "cyd").await;
    let id = room(&s, &ana).await;

    let mut a = s.socket(id, &ana).await;
    let mut b = s.socket(id, &ben).await;
    let mut c = s.socket(id, &cyd).await;
    join(&mut a, false).await;
    join(&mut b, false).await;
    join(&mut c, true).await;

    a.send("start", json!({"seed": 3})).await;
    let bracket = c.expect("bracket").await;
    assert_eq!(bracket["payload"]["players"].as_array().unwrap().len(), 2);
    let begin = a.expect("round_begin").await;
    assert_eq!(begin, b.expect("round_begin").await);
    let qid = begin["payload"]["question_id"].as_u64().unwrap() as u32;
    assert!(begin["payload"]["question_text"].is_string());
    assert!(begin["payload"]["deadline"].is_string());
    let answer = answer_for(&s.state, qid);

    a.send("answer", json!({"text": "SELECT nonsense FROM nowhere"}))
        .await;
    let wrong = a.expect("answer_result").await;
    assert_eq!(wrong["payload"]["correct"], false);
    assert_eq!(wrong["payload"]["player"], "ana");

    a.send("answer", json!({"text": answer})).await;
    b.send("answer", json!({"text": answer})).await;
    let end = c.expect("round_end").await;
    let winner = end["payload"]["winner"].as_str().unwrap().to_string();
    assert!(winner == "ana" || winner == "ben");
    let game_end = c.expect("game_end").await;
    assert_eq!(game_end["payload"]["champion"], winner.as_str());
    let loser_client = if winner == "ana" { &mut b } else { &mut a };
    let ended = loser_client.expect("game_end").await;
    assert_eq!(ended["payload"]["champion"], winner.as_str());

    // the result lands in the casual multiplayer ladder
    let mut entries = Value::Null;
    for _ in 0..50 {
        let (_, page) = s
            .call(Method::GET, "/api/rankings/MP_CASUAL", Some(&cyd), None)
            .await;
        if page["entries"].as_array().is_some_and(|e| e.len() == 2) {
            entries = page["entries"].clone();
            break;
        }
        tokio::time::sleep(std::time::Duration::from_millis(20)).await;
    }
    assert_eq!(entries[0]["username"], winner.as_str());
    assert_eq!(entries[0]["rating"], 1016);
    assert_eq!(entries[1]["rating"], 984);
}
