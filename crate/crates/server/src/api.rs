//! JSON request handlers.

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::Json;
use chrono::{DateTime, Utc};
use queryarena::arena::{RoomConfig, RoomSnapshot, RoomSummary};
use queryarena::game::{Removal, ScoreReport, SessionView, SoloMode};
use queryarena::guard::QuestionSpec;
use queryarena::registry::{
    GameMode, LeaderboardEntry, LectureEntry, LectureInput, LectureSummary, ProfileDetails,
    ProfileSummary, ProfileView, Role, VerificationCode,
};
use queryarena::sql::{ExecOutcome, Value};
use serde::{Deserialize, Serialize};

use crate::auth::AuthUser;
use crate::error::ApiError;
use crate::AppState;

type ApiResult<T> = Result<Json<T>, ApiError>;

// Accounts

#[derive(Debug, Deserialize)]
pub struct RegisterRequest {
    pub username: String,
    pub password: String,
    pub code: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub program: String,
}

#[derive(Debug, Deserialize)]
pub struct LoginRequest {
    pub username: String,
    pub password: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TokenResponse {
    pub token: String,
    pub username: String,
    pub role: Role,
    pub expires_at: DateTime<Utc>,
}

fn token_response(state: &AppState, username: &str, role: Role) -> TokenResponse {
    let (token, session) = state
        .sessions
        .issue(username, role, state.registry.clock().now());
    TokenResponse {
        token,
        username: username.to_string(),
        role,
        expires_at: session.expires_at,
    }
}

pub async fn register(
    State(state): State<AppState>,
    Json(req): Json<RegisterRequest>,
) -> Result<(StatusCode, Json<TokenResponse>), ApiError> {
    let details = ProfileDetails {
        name: req.name,
        program: req.program,
    };
    let account =
        state
            .registry
            .register_student(&req.username, &req.password, &req.code, details)?;
    let body = token_response(&state, &account.username, account.role);
    Ok((StatusCode::CREATED, Json(body)))
}

pub async fn login(
    State(state): State<AppState>,
    Json(req): Json<LoginRequest>,
) -> ApiResult<TokenResponse> {
    let account = state.registry.authenticate(&req.username, &req.password)?;
    Ok(Json(token_response(
        &state,
        &account.username,
        account.role,
    )))
}

pub async fn logout(State(state): State<AppState>, user: AuthUser) -> StatusCode {
    state.sessions.revoke(&user.token);
    StatusCode::NO_CONTENT
}

pub async fn me(State(state): State<AppState>, user: AuthUser) -> ApiResult<ProfileView> {
    Ok(Json(state.registry.profile(user.username())?))
}

pub async fn issue_code(
    State(state): State<AppState>,
    user: AuthUser,
) -> Result<(StatusCode, Json<VerificationCode>), ApiError> {
    let code = state.registry.issue_verification_code(user.username())?;
    Ok((StatusCode::CREATED, Json(code)))
}

// Profiles and rankings

pub async fn profile(
    State(state): State<AppState>,
    _user: AuthUser,
    Path(username): Path<String>,
) -> ApiResult<ProfileView> {
    Ok(Json(state.registry.profile(&username)?))
}

#[derive(Debug, Deserialize)]
pub struct SearchQuery {
    #[serde(default)]
    pub search: String,
}

pub async fn search_profiles(
    State(state): State<AppState>,
    _user: AuthUser,
    Query(q): Query<SearchQuery>,
) -> Json<Vec<ProfileSummary>> {
    Json(state.registry.search_profiles(&q.search))
}

#[derive(Debug, Deserialize)]
pub struct PageQuery {
    #[serde(default)]
    pub page: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RankingPage {
    pub mode: GameMode,
    pub page: usize,
    pub entries: Vec<LeaderboardEntry>,
}

pub async fn rankings(
    State(state): State<AppState>,
    _user: AuthUser,
    Path(mode): Path<String>,
    Query(q): Query<PageQuery>,
) -> ApiResult<RankingPage> {
    let parsed: GameMode = mode
        .parse()
        .map_err(queryarena::registry::RegistryError::from)?;
    let entries = state.registry.leaderboard(&mode, q.page)?;
    Ok(Json(RankingPage {
        mode: parsed,
        page: q.page,
        entries,
    }))
}

// Lectures

pub async fn list_lectures(
    State(state): State<AppState>,
    _user: AuthUser,
) -> Json<Vec<LectureSummary>> {
    Json(state.registry.list_lectures())
}

pub async fn get_lecture(
    State(state): State<AppState>,
    _user: AuthUser,
    Path(id): Path<u64>,
) -> ApiResult<LectureEntry> {
    Ok(Json(state.registry.lecture(id)?))
}

pub async fn create_lecture(
    State(state): State<AppState>,
    user: AuthUser,
    Json(input): Json<LectureInput>,
) -> Result<(StatusCode, Json<LectureEntry>), ApiError> {
    let entry = state.registry.save_lecture(user.username(), None, input)?;
    Ok((StatusCode::CREATED, Json(entry)))
}

pub async fn update_lecture(
    State(state): State<AppState>,
    user: AuthUser,
    Path(id): Path<u64>,
    Json(input): Json<LectureInput>,
) -> ApiResult<LectureEntry> {
    Ok(Json(state.registry.save_lecture(
        user.username(),
        Some(id),
        input,
    )?))
}

// Question panel

pub async fn list_questions(
    State(state): State<AppState>,
    user: AuthUser,
) -> ApiResult<Vec<QuestionSpec>> {
    Ok(Json(state.registry.list_questions(user.username())?))
}

pub async fn add_question(
    State(state): State<AppState>,
    user: AuthUser,
    Json(spec): Json<QuestionSpec>,
) -> Result<(StatusCode, Json<QuestionSpec>), ApiError> {
    let spec = state.registry.add_question(user.username(), spec)?;
    Ok((StatusCode::CREATED, Json(spec)))
}

pub async fn edit_question(
    State(state): State<AppState>,
    user: AuthUser,
    Path(id): Path<u32>,
    Json(spec): Json<QuestionSpec>,
) -> ApiResult<QuestionSpec> {
    Ok(Json(state.registry.edit_question(
        user.username(),
        id,
        spec,
    )?))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DeleteResponse {
    pub id: u32,
    /// True when the question is still in use and goes away once released.
    pub deferred: bool,
}

pub async fn delete_question(
    State(state): State<AppState>,
    user: AuthUser,
    Path(id): Path<u32>,
) -> ApiResult<DeleteResponse> {
    let removal = state.registry.delete_question(user.username(), id)?;
    Ok(Json(DeleteResponse {
        id,
        deferred: removal == Removal::Deferred,
    }))
}

// Solo play

#[derive(Debug, Deserialize)]
pub struct SoloRequest {
    pub mode: SoloMode,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub async fn start_solo(
    State(state): State<AppState>,
    user: AuthUser,
    Json(req): Json<SoloRequest>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let seed = req.seed.unwrap_or_else(rand::random);
    let view = state
        .solo
        .start(&state.registry, user.username(), req.mode, seed)?;
    Ok((StatusCode::CREATED, Json(view)))
}

pub async fn get_solo(
    State(state): State<AppState>,
    user: AuthUser,
    Path(id): Path<u64>,
) -> ApiResult<SessionView> {
    Ok(Json(
        state.solo.with(id, user.username(), |s| Ok(s.view()))?,
    ))
}

#[derive(Debug, Deserialize)]
pub struct AnswerRequest {
    pub index: usize,
    pub text: String,
}

#[derive(Debug, Deserialize)]
pub struct SkipRequest {
    pub index: usize,
}

pub async fn solo_answer(
    State(state): State<AppState>,
    user: AuthUser,
    Path(id): Path<u64>,
    Json(req): Json<AnswerRequest>,
) -> ApiResult<SessionView> {
    Ok(Json(state.solo.with(id, user.username(), |s| {
        s.answer(req.index, &req.text)?;
        Ok(s.view())
    })?))
}

pub async fn solo_skip(
    State(state): State<AppState>,
    user: AuthUser,
    Path(id): Path<u64>,
    Json(req): Json<SkipRequest>,
) -> ApiResult<SessionView> {
    Ok(Json(state.solo.with(id, user.username(), |s| {
        s.skip(req.index)?;
        Ok(s.view())
    })?))
}

pub async fn solo_submit(
    State(state): State<AppState>,
    user: AuthUser,
    Path(id): Path<u64>,
) -> ApiResult<ScoreReport> {
    Ok(Json(state.solo.submit(
        &state.registry,
        id,
        user.username(),
    )?))
}

// Practice sandbox

#[derive(Debug, Deserialize)]
pub struct PracticeRequest {
    pub query: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PracticeResponse {
    Rows {
        columns: Vec<String>,
        rows: Vec<Vec<Value>>,
        serialized: String,
    },
    Affected {
        affected: u64,
    },
}

pub async fn practice_query(
    State(state): State<AppState>,
    user: AuthUser,
    Json(req): Json<PracticeRequest>,
) -> ApiResult<PracticeResponse> {
    let out = state.registry.practice(user.username(), &req.query)?;
    Ok(Json(match out {
        ExecOutcome::Rows(rs) => PracticeResponse::Rows {
            serialized: rs.serialize(),
            columns: rs.columns,
            rows: rs.rows,
        },
        ExecOutcome::Affected(n) => PracticeResponse::Affected { affected: n },
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SandboxView {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

pub async fn practice_table(
    State(state): State<AppState>,
    user: AuthUser,
) -> ApiResult<SandboxView> {
    let table = state
        .registry
        .sandbox(user.username())
        .ok_or_else(|| ApiError::not_found("no sandbox for this account"))?;
    Ok(Json(SandboxView {
        columns: table.column_names(),
        name: table.name,
        rows: table.rows,
    }))
}

pub async fn practice_reset(
    State(state): State<AppState>,
    user: AuthUser,
) -> ApiResult<SandboxView> {
    let table = state.registry.reset_sandbox(user.username())?;
    Ok(Json(SandboxView {
        columns: table.column_names(),
        name: table.name,
        rows: table.rows,
    }))
}

// Rooms

pub async fn list_rooms(State(state): State<AppState>, _user: AuthUser) -> Json<Vec<RoomSummary>> {
    Json(state.rooms.list())
}

pub async fn create_room(
    State(state): State<AppState>,
    user: AuthUser,
    Json(config): Json<RoomConfig>,
) -> Result<(StatusCode, Json<RoomSummary>), ApiError> {
    let summary = state
        .rooms
        .create(user.username(), user.session.role, config)?;
    Ok((StatusCode::CREATED, Json(summary)))
}

pub async fn get_room(
    State(state): State<AppState>,
    _user: AuthUser,
    Path(id): Path<u64>,
) -> ApiResult<RoomSnapshot> {
    state
        .rooms
        .snapshot(id)
        .await
        .map(Json)
        .ok_or_else(|| ApiError::not_found(format!("unknown room {id}")))
}
