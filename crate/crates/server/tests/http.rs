mod common;

use common::{spawn, ADMIN};
use reqwest::{Method, StatusCode};
use serde_json::json;

#[tokio::test]
async fn auth_errors() {
    let s = spawn().await;
    let (status, body) = s
        .call(
            Method::POST,
            "/api/login",
            None,
            Some(json!({"username": ADMIN, "password": "wrongpass"})),
        )
        .await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    assert_eq!(body["code"], "BAD_CREDENTIALS");

    let (status, body) = s.call(Method::GET, "/api/lectures", None, None).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    assert_eq!(body["code"], "UNAUTHORIZED");
    let (status, _) = s
        .call(Method::GET, "/api/lectures", Some("deadbeef"), None)
        .await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn role_and_validation_errors() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let ana = s.student(&admin, "ana").await;

    let (status, body) = s
        .call(
            Method::POST,
            "/api/questions",
            Some(&ana),
            Some(json!({
                "id": 0, "text": "x", "difficulty": 1, "category": "DROP",
                "grading_mode": "EXACT", "stored_answers": ["DROP TABLE x"]
            })),
        )
        .await;
    assert_eq!(status, StatusCode::FORBIDDEN, "{body}");
    let (status, _) = s.call(Method::POST, "/api/codes", Some(&ana), None).await;
    assert_eq!(status, StatusCode::FORBIDDEN);

    let (status, body) = s
        .call(
            Method::POST,
            "/api/register",
            None,
            Some(json!({
                "username": "bob", "password": "password1", "code": "NOPE2345"
            })),
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "BAD_CODE");

    let (status, _) = s
        .call(Method::GET, "/api/profile/nobody", Some(&ana), None)
        .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, body) = s
        .call(Method::GET, "/api/rankings/CHESS", Some(&ana), None)
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "INVALID_MODE");
}

#[tokio::test]
async fn question_panel_round_trip() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let (status, list) = s
        .call(Method::GET, "/api/questions", Some(&admin), None)
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list.as_array().unwrap().len(), 30);

    let spec = json!({
        "id": 0, "text": "Remove the table named tbl_tmp.", "difficulty": 1,
        "category": "DROP", "grading_mode": "EXACT", "stored_answers": ["DROP TABLE tbl_tmp"]
    });
    let (status, added) = s
        .call(Method::POST, "/api/questions", Some(&admin), Some(spec))
        .await;
    assert_eq!(status, StatusCode::CREATED, "{added}");
    let id = added["id"].as_u64().unwrap();
    assert_eq!(id, 31);

    let mut edited = added.clone();
    edited["difficulty"] = json!(2);
    let (status, body) = s
        .call(
            Method::PUT,
            &format!("/api/questions/{id}"),
            Some(&admin),
            Some(edited),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["difficulty"], 2);

    let (status, body) = s
        .call(
            Method::DELETE,
            &format!("/api/questions/{id}"),
            Some(&admin),
            None,
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["deferred"], false);
    let (status, _) = s
        .call(
            Method::DELETE,
            &format!("/api/questions/{id}"),
            Some(&admin),
            None,
        )
        .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn practice_queries() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let ana = s.student(&admin, "ana").await;
    s.student(&admin, "ben").await;
    let (status, table) = s
        .call(Method::GET, "/api/practice/table", Some(&ana), None)
        .await;
    assert_eq!(status, StatusCode::OK);
    let own = table["name"].as_str().unwrap().to_string();

    let q = |sql: String| Some(json!({ "query": sql }));
    let (status, body) = s
        .call(
            Method::POST,
            "/api/practice/query",
            Some(&ana),
            q(format!("SELECT * FROM {own}")),
        )
        .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["kind"], "ROWS");
    assert!(body["serialized"]
        .as_str()
        .unwrap()
        .starts_with("id|name|created"));

    let (status, body) = s
        .call(
            Method::POST,
            "/api/practice/query",
            Some(&ana),
            q(format!("DELETE FROM {own} WHERE id = 1")),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["affected"], 1);

    let (status, body) = s
        .call(
            Method::POST,
            "/api/practice/query",
            Some(&ana),
            q(format!("DROP TABLE {own}")),
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "FORBIDDEN_CLASS");

    let other = own.replace("ana", "ben");
    let (status, body) = s
        .call(
            Method::POST,
            "/api/practice/query",
            Some(&ana),
            q(format!("SELECT * FROM {other}")),
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "FOREIGN_TABLE");

    let (status, body) = s
        .call(Method::POST, "/api/practice/reset", Some(&ana), None)
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["rows"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn solo_session_flow() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let ana = s.student(&admin, "ana").await;
    let (status, view) = s
        .call(
            Method::POST,
            "/api/solo",
            Some(&ana),
            Some(json!({"mode": {"kind": "CASUAL"}, "seed": 5})),
        )
        .await;
    assert_eq!(status, StatusCode::CREATED, "{view}");
    let id = view["id"].as_u64().unwrap();
    let questions = view["questions"].as_array().unwrap();
    assert_eq!(questions.len(), 10);
    assert!(!view.to_string().contains("stored_answers"));

    let first = questions[0]["id"].as_u64().unwrap() as u32;
    let answer = common::answer_for(&s.state, first);
    let path = |p: &str| format!("/api/solo/{id}{p}");
    let (status, _) = s
        .call(
            Method::POST,
            &path("/skip"),
            Some(&ana),
            Some(json!({"index": 0})),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    let (status, view) = s
        .call(
            Method::POST,
            &path("/answer"),
            Some(&ana),
            Some(json!({"index": 0, "text": answer})),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["answers"][0]["state"], "ANSWERED");
    let (status, body) = s
        .call(
            Method::POST,
            &path("/answer"),
            Some(&ana),
            Some(json!({"index": 10, "text": "x"})),
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "INDEX_OUT_OF_RANGE");

    let ben = s.student(&admin, "ben").await;
    let (status, _) = s.call(Method::GET, &path(""), Some(&ben), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, report) = s
        .call(Method::POST, &path("/submit"), Some(&ana), None)
        .await;
    assert_eq!(status, StatusCode::OK, "{report}");
    assert_eq!(report["total_questions"], 10);
    assert!(report["total_correct"].as_u64().unwrap() >= 1);
    let (status, body) = s
        .call(Method::POST, &path("/submit"), Some(&ana), None)
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "ALREADY_SUBMITTED");

    let (_, page) = s
        .call(Method::GET, "/api/rankings/SOLO_CASUAL", Some(&ana), None)
        .await;
    assert_eq!(page["entries"][0]["username"], "ana");
    let (_, me) = s.call(Method::GET, "/api/me", Some(&ana), None).await;
    assert_eq!(me["profile"]["username"], "ana");
}

#[tokio::test]
async fn idempotent_retries() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let (_, a) = s
        .call_with(Method::POST, "/api/codes", Some(&admin), None, Some("k1"))
        .await;
    let (_, b) = s
        .call_with(Method::POST, "/api/codes", Some(&admin), None, Some("k1"))
        .await;
    let (_, c) = s
        .call_with(Method::POST, "/api/codes", Some(&admin), None, Some("k2"))
        .await;
    assert_eq!(a, b);
    assert_ne!(a["code"], c["code"]);

    let register = serde_json::json!({
        "username": "ana", "password": "password1", "code": a["code"]
    });
    let (s1, r1) = s
        .call_with(
            Method::POST,
            "/api/register",
            None,
            Some(register.clone()),
            Some("reg"),
        )
        .await;
    let (s2, r2) = s
        .call_with(
            Method::POST,
            "/api/register",
            None,
            Some(register),
            Some("reg"),
        )
        .await;
    assert_eq!((s1, s2), (StatusCode::CREATED, StatusCode::CREATED));
    assert_eq!(r1, r2);
    assert_eq!(s.state.registry.export_state().accounts.len(), 2);
}

#[tokio::test]
async fn lectures() {
    let s = spawn().await;
    let admin = s.admin_token().await;
    let ana = s.student(&admin, "ana").await;
    let lecture = json!({
        "title": "Filtering rows",
        "mode": "TUTORIAL",
        "blocks": [
            {"kind": "TEXT", "text": "WHERE keeps matching rows."},
            {"kind": "TEXT", "text": "Try it:", "demo": {
                "setup": ["CREATE TABLE t (a INT)", "INSERT INTO t VALUES (1), (2)"],
                "query": "SELECT a FROM t WHERE a > 1"
            }}
        ]
    });
    let (status, _) = s
        .call(
            Method::POST,
            "/api/lectures",
            Some(&ana),
            Some(lecture.clone()),
        )
        .await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    let (status, entry) = s
        .call(Method::POST, "/api/lectures", Some(&admin), Some(lecture))
        .await;
    assert_eq!(status, StatusCode::CREATED, "{entry}");
    let id = entry["id"].as_u64().unwrap();
    let (status, got) = s
        .call(
            Method::GET,
            &format!("/api/lectures/{id}"),
            Some(&ana),
            None,
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(got["blocks"][1]["demo"]["transcript"], "a\n2");
    let (_, list) = s.call(Method::GET, "/api/lectures", Some(&ana), None).await;
    assert_eq!(list.as_array().unwrap().len(), 1);
}
