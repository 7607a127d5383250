//! Accounts, verification codes, profiles, ratings and leaderboards,
//! lectures, game records, the admin question panel, and durable storage.
//!
//! Mutations are serialised through one writer lock and recorded as
//! [`Record`]s in an append-only log before they become visible; readers
//! share the current state concurrently.

mod clock;
mod lecture;
mod password;
mod rating;
mod state;
mod store;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use chrono::Duration;
use parking_lot::{Mutex, RwLock};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::MatchRecord;
use crate::game::{
    draw_questions, provision_sandbox, GameError, PracticeError, QuestionBank, Removal, Sandbox,
    ScoreReport, SoloMode,
};
use crate::guard::{ingest_question, InvalidQuestion, Question, QuestionSpec};
use crate::sql::{ExecOutcome, StatementClass, TableState};

pub use clock::{Clock, ManualClock, SystemClock};
pub use lecture::{
    demo_transcript, Block, BlockContent, Demo, LectureEntry, LectureInput, LectureMode,
    LectureSummary,
};
pub use password::{hash_password, verify_password, HashCost};
pub use rating::{
    elo_update, GameMode, LeaderboardEntry, Rating, UnknownMode, ELO_BASE, ELO_K, LEADERBOARD_PAGE,
};
pub use state::{
    Account, GameRecord, Outcome, ProfileDetails, ProfileSummary, Record, RegistryState, Role,
    VerificationCode,
};
pub use store::{read_questions, write_questions, Store, LOG_FILE, QUESTIONS_FILE, SNAPSHOT_FILE};

use state::key;

pub const CODE_LEN: usize = 8;
pub const CODE_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ23456789";
pub const MIN_PASSWORD_LEN: usize = 8;
pub const SEARCH_LIMIT: usize = 50;
const RECENT_RECORDS: usize = 20;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("administrator role required")]
    NotAdmin,
    #[error("verification code is unknown, used or expired")]
    BadCode,
    #[error("username is taken")]
    UsernameTaken,
    #[error("password must be at least {MIN_PASSWORD_LEN} characters")]
    WeakPassword,
    #[error("invalid username: {0}")]
    InvalidUsername(String),
    #[error("wrong username or password")]
    BadCredentials,
    #[error("unknown user '{0}'")]
    UnknownUser(String),
    #[error(transparent)]
    InvalidMode(#[from] UnknownMode),
    #[error(transparent)]
    InvalidQuestion(#[from] InvalidQuestion),
    #[error("unknown question id {0}")]
    UnknownQuestionId(u32),
    #[error("question id {0} already exists")]
    DuplicateQuestionId(u32),
    #[error("unknown lecture {0}")]
    UnknownLecture(u64),
    #[error("invalid lecture: {0}")]
    InvalidLecture(String),
    #[error(transparent)]
    Practice(#[from] PracticeError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("{file} line {line} is corrupt: {message}")]
    CorruptLog {
        file: String,
        line: usize,
        message: String,
    },
    #[error("storage: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy)]
pub struct RegistryConfig {
    pub hash_cost: HashCost,
    /// Log lines between snapshots; 0 disables automatic snapshots.
    pub snapshot_every: u64,
    /// fsync each log append.
    pub sync: bool,
    pub code_ttl: Duration,
}

impl Default for RegistryConfig {
    fn default() -> Self {
        Self {
            hash_cost: HashCost::default(),
            snapshot_every: 500,
            sync: true,
            code_ttl: Duration::days(7),
        }
    }
}

impl RegistryConfig {
    /// Minimal hashing cost and no fsync. Tests and demos only.
    pub fn fast() -> Self {
        Self {
            hash_cost: HashCost::MINIMAL,
            sync: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileView {
    pub profile: ProfileSummary,
    pub ratings: BTreeMap<GameMode, Rating>,
    pub recent_records: Vec<GameRecord>,
}

pub struct Registry {
    state: RwLock<RegistryState>,
    bank: RwLock<QuestionBank>,
    store: Mutex<Option<Store>>,
    clock: Arc<dyn Clock>,
    config: RegistryConfig,
}

impl std::fmt::Debug for Registry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry")
            .field("accounts", &self.state.read().accounts.len())
            .field("questions", &self.bank.read().len())
            .finish_non_exhaustive()
    }
}

fn validate_username(username: &str) -> Result<(), RegistryError> {
    let len = username.chars().count();
    if !(3..=32).contains(&len) {
        return Err(RegistryError::InvalidUsername("3 to 32 characters".into()));
    }
    if !username
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        return Err(RegistryError::InvalidUsername(
            "letters, digits and underscores only".into(),
        ));
    }
    Ok(())
}

impl Registry {
    pub fn in_memory(config: RegistryConfig, clock: Arc<dyn Clock>) -> Self {
        Self {
            state: RwLock::new(RegistryState::default()),
            bank: RwLock::new(QuestionBank::new()),
            store: Mutex::new(None),
            clock,
            config,
        }
    }

    /// Opens (or creates) a data directory and restores its state.
    pub fn open(
        dir: &Path,
        config: RegistryConfig,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, RegistryError> {
        let (store, state) = Store::open(dir, config.snapshot_every, config.sync)?;
        let mut bank = QuestionBank::new();
        for spec in store.read_questions()? {
            bank.upsert(ingest_question(spec)?);
        }
        Ok(Self {
            state: RwLock::new(state),
            bank: RwLock::new(bank),
            store: Mutex::new(Some(store)),
            clock,
            config,
        })
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    /// Runs one serialised mutation: `f` inspects the state and returns the
    /// records to persist, which are logged and then applied.
    fn commit<T>(
        &self,
        f: impl FnOnce(&RegistryState) -> Result<(Vec<Record>, T), RegistryError>,
    ) -> Result<T, RegistryError> {
        let mut store = self.store.lock();
        let (records, out) = f(&self.state.read())?;
        if records.is_empty() {
            return Ok(out);
        }
        if let Some(s) = store.as_mut() {
            s.append(&records)?;
        }
        let mut state = self.state.write();
        for r in &records {
            state.apply(r);
        }
        if let Some(s) = store.as_mut() {
            if s.snapshot_due() {
                s.snapshot(&state)?;
            }
        }
        Ok(out)
    }

    /// Forces a snapshot and empties the log.
    pub fn checkpoint(&self) -> Result<(), RegistryError> {
        let mut store = self.store.lock();
        if let Some(s) = store.as_mut() {
            s.snapshot(&self.state.read())?;
        }
        Ok(())
    }

    pub fn export_state(&self) -> RegistryState {
        self.state.read().clone()
    }

    // Accounts

    fn new_account(
        &self,
        username: &str,
        password: &str,
        role: Role,
        details: ProfileDetails,
    ) -> Result<Account, RegistryError> {
        validate_username(username)?;
        if password.chars().count() < MIN_PASSWORD_LEN {
            return Err(RegistryError::WeakPassword);
        }
        Ok(Account {
            username: username.to_string(),
            password_digest: hash_password(password, self.config.hash_cost),
            role,
            details,
            created_at: self.clock.now(),
        })
    }

    /// Creates an administrator directly; used for bootstrapping.
    pub fn create_admin(
        &self,
        username: &str,
        password: &str,
        details: ProfileDetails,
    ) -> Result<Account, RegistryError> {
        let account = self.new_account(username, password, Role::Admin, details)?;
        self.commit(|st| {
            if st.account(username).is_some() {
                return Err(RegistryError::UsernameTaken);
            }
            Ok((
                vec![Record::AccountCreated {
                    account: account.clone(),
                }],
                account,
            ))
        })
    }

    pub fn issue_verification_code(&self, admin: &str) -> Result<VerificationCode, RegistryError> {
        self.require_admin(admin)?;
        let now = self.clock.now();
        self.commit(|st| {
            let mut rng = rand::rng();
            let code = loop {
                let c: String = (0..CODE_LEN)
                    .map(|_| CODE_ALPHABET[rng.random_range(0..CODE_ALPHABET.len())] as char)
                    .collect();
                if !st.codes.contains_key(&c) {
                    break c;
                }
            };
            let code = VerificationCode {
                code,
                issued_by: admin.to_string(),
                issued_at: now,
                expires_at: now + self.config.code_ttl,
                consumed_by: None,
                consumed_at: None,
            };
            Ok((vec![Record::CodeIssued { code: code.clone() }], code))
        })
    }

    /// Creates a student account, consuming `code` and provisioning the
    /// practice sandbox in the same logged step.
    pub fn register_student(
        &self,
        username: &str,
        password: &str,
        code: &str,
        details: ProfileDetails,
    ) -> Result<Account, RegistryError> {
        let account = self.new_account(username, password, Role::Student, details)?;
        let code = code.trim().to_ascii_uppercase();
        let now = self.clock.now();
        let out = self.commit(|st| {
            match st.codes.get(&code) {
                Some(c) if c.usable_at(now) => {}
                _ => return Err(RegistryError::BadCode),
            }
            if st.account(username).is_some() {
                return Err(RegistryError::UsernameTaken);
            }
            let records = vec![
                Record::AccountCreated {
                    account: account.clone(),
                },
                Record::CodeConsumed {
                    code: code.clone(),
                    by: username.to_string(),
                    at: now,
                },
                Record::SandboxSaved {
                    username: username.to_string(),
                    table: provision_sandbox(username),
                },
            ];
            Ok((records, account))
        })?;
        tracing::info!(username, "student registered");
        Ok(out)
    }

    pub fn authenticate(&self, username: &str, password: &str) -> Result<Account, RegistryError> {
        let account = self
            .account(username)
            .ok_or(RegistryError::BadCredentials)?;
        if verify_password(password, &account.password_digest) {
            Ok(account)
        } else {
            Err(RegistryError::BadCredentials)
        }
    }

    pub fn account(&self, username: &str) -> Option<Account> {
        self.state.read().account(username).cloned()
    }

    pub fn require_admin(&self, username: &str) -> Result<Account, RegistryError> {
        match self.account(username) {
            Some(a) if a.role == Role::Admin => Ok(a),
            _ => Err(RegistryError::NotAdmin),
        }
    }

    pub fn profile(&self, username: &str) -> Result<ProfileView, RegistryError> {
        let st = self.state.read();
        let account = st
            .account(username)
            .ok_or_else(|| RegistryError::UnknownUser(username.to_string()))?;
        let ratings = GameMode::ALL
            .into_iter()
            .map(|m| (m, st.rating(username, m)))
            .collect();
        let k = key(username);
        let recent_records = st
            .records
            .iter()
            .rev()
            .filter(|r| key(&r.player) == k)
            .take(RECENT_RECORDS)
            .cloned()
            .collect();
        Ok(ProfileView {
            profile: account.summary(),
            ratings,
            recent_records,
        })
    }

    /// Case-insensitive substring search over username and display name,
    /// ordered by username, at most [`SEARCH_LIMIT`] results.
    pub fn search_profiles(&self, query: &str) -> Vec<ProfileSummary> {
        let needle = query.to_lowercase();
        self.state
            .read()
            .accounts
            .iter()
            .filter(|(k, a)| k.contains(&needle) || a.details.name.to_lowercase().contains(&needle))
            .take(SEARCH_LIMIT)
            .map(|(_, a)| a.summary())
            .collect()
    }

    pub fn records_for(&self, username: &str) -> Vec<GameRecord> {
        let k = key(username);
        self.state
            .read()
            .records
            .iter()
            .filter(|r| key(&r.player) == k)
            .cloned()
            .collect()
    }

    // Ratings

    pub fn rating(&self, username: &str, mode: GameMode) -> Rating {
        self.state.read().rating(username, mode)
    }

    fn elo_records(
        st: &RegistryState,
        pending: &mut BTreeMap<(String, GameMode), Rating>,
        mode: GameMode,
        winner: &str,
        loser: &str,
    ) -> (Rating, Rating) {
        let mut get = |u: &str| {
            *pending
                .entry((key(u), mode))
                .or_insert_with(|| st.rating(u, mode))
        };
        let (mut w, mut l) = (get(winner), get(loser));
        let (nw, nl) = elo_update(w.rating, l.rating);
        w.rating = nw;
        w.wins += 1;
        w.games_played += 1;
        l.rating = nl;
        l.losses += 1;
        l.games_played += 1;
        pending.insert((key(winner), mode), w);
        pending.insert((key(loser), mode), l);
        (w, l)
    }

    fn rating_records(
        st: &RegistryState,
        pending: BTreeMap<(String, GameMode), Rating>,
    ) -> Vec<Record> {
        pending
            .into_iter()
            .map(|((k, mode), rating)| Record::RatingSet {
                username: st.accounts[&k].username.clone(),
                mode,
                rating,
            })
            .collect()
    }

    /// One Elo update for a decided multiplayer match.
    pub fn update_rating(
        &self,
        mode: GameMode,
        winner: &str,
        loser: &str,
    ) -> Result<(Rating, Rating), RegistryError> {
        if mode.is_solo() {
            return Err(UnknownMode(format!("{mode} has no head-to-head ratings")).into());
        }
        self.commit(|st| {
            for u in [winner, loser] {
                if st.account(u).is_none() {
                    return Err(RegistryError::UnknownUser(u.to_string()));
                }
            }
            let mut pending = BTreeMap::new();
            let out = Self::elo_records(st, &mut pending, mode, winner, loser);
            Ok((Self::rating_records(st, pending), out))
        })
    }

    /// Adds a solo score to the player's cumulative points and records it.
    pub fn record_solo(
        &self,
        username: &str,
        mode: SoloMode,
        report: &ScoreReport,
    ) -> Result<Rating, RegistryError> {
        let game_mode = match mode {
            SoloMode::Casual => GameMode::SoloCasual,
            SoloMode::Custom { .. } => GameMode::SoloCustom,
        };
        let now = self.clock.now();
        self.commit(|st| {
            let account = st
                .account(username)
                .ok_or_else(|| RegistryError::UnknownUser(username.to_string()))?;
            let mut rating = st.rating(username, game_mode);
            rating.rating += i64::from(report.total_correct);
            rating.games_played += 1;
            let record = GameRecord {
                id: st.records.len() as u64 + 1,
                player: account.username.clone(),
                mode: game_mode,
                at: now,
                outcome: Outcome::Solo {
                    report: report.clone(),
                },
            };
            Ok((
                vec![
                    Record::RatingSet {
                        username: account.username.clone(),
                        mode: game_mode,
                        rating,
                    },
                    Record::GameRecorded { record },
                ],
                rating,
            ))
        })
    }

    /// Applies every decided match of a finished room to the ratings and
    /// appends one game record per player, all as one logged step.
    pub fn record_room(
        &self,
        mode: GameMode,
        room_id: u64,
        room_name: &str,
        standings: &[String],
        results: &[MatchRecord],
    ) -> Result<(), RegistryError> {
        let now = self.clock.now();
        self.commit(|st| {
            let known: Vec<&String> = standings
                .iter()
                .filter(|u| st.account(u).is_some())
                .collect();
            let mut pending = BTreeMap::new();
            for m in results {
                if st.account(&m.winner).is_some() && st.account(&m.loser).is_some() {
                    Self::elo_records(st, &mut pending, mode, &m.winner, &m.loser);
                }
            }
            let mut records = Self::rating_records(st, pending);
            let champion = standings.first().cloned().unwrap_or_default();
            let mut next_id = st.records.len() as u64;
            for (place, user) in standings.iter().enumerate() {
                if !known.contains(&user) {
                    continue;
                }
                next_id += 1;
                records.push(Record::GameRecorded {
                    record: GameRecord {
                        id: next_id,
                        player: user.clone(),
                        mode,
                        at: now,
                        outcome: Outcome::Multiplayer {
                            room_id,
                            room_name: room_name.to_string(),
                            placement: place as u32 + 1,
                            players: standings.len() as u32,
                            champion: champion.clone(),
                            wins: results.iter().filter(|m| &m.winner == user).count() as u32,
                            losses: results.iter().filter(|m| &m.loser == user).count() as u32,
                        },
                    },
                });
            }
            Ok((records, ()))
        })
    }

    /// Ranked players of a mode, 25 per page (`page` counts from 0).
    /// Ordered by rating, then by earlier account creation.
    pub fn leaderboard(
        &self,
        mode: &str,
        page: usize,
    ) -> Result<Vec<LeaderboardEntry>, RegistryError> {
        let mode: GameMode = mode.parse()?;
        let st = self.state.read();
        let mut rows: Vec<(&Account, Rating)> = st
            .accounts
            .values()
            .map(|a| (a, st.rating(&a.username, mode)))
            .filter(|(_, r)| r.games_played > 0)
            .collect();
        rows.sort_by(|(a, ra), (b, rb)| {
            rb.rating
                .cmp(&ra.rating)
                .then(a.created_at.cmp(&b.created_at))
                .then_with(|| key(&a.username).cmp(&key(&b.username)))
        });
        Ok(rows
            .into_iter()
            .enumerate()
            .skip(page.saturating_mul(LEADERBOARD_PAGE))
            .take(LEADERBOARD_PAGE)
            .map(|(i, (a, r))| LeaderboardEntry {
                rank: i + 1,
                username: a.username.clone(),
                rating: r.rating,
                wins: r.wins,
                losses: r.losses,
                games_played: r.games_played,
            })
            .collect())
    }

    // Lectures

    pub fn list_lectures(&self) -> Vec<LectureSummary> {
        self.state
            .read()
            .lectures
            .values()
            .map(LectureEntry::summary)
            .collect()
    }

    pub fn lecture(&self, id: u64) -> Result<LectureEntry, RegistryError> {
        self.state
            .read()
            .lectures
            .get(&id)
            .cloned()
            .ok_or(RegistryError::UnknownLecture(id))
    }

    /// Creates a lecture (`id = None`) or replaces an existing one.
    pub fn save_lecture(
        &self,
        admin: &str,
        id: Option<u64>,
        input: LectureInput,
    ) -> Result<LectureEntry, RegistryError> {
        self.require_admin(admin)?;
        self.commit(|st| {
            let id = match id {
                Some(id) if st.lectures.contains_key(&id) => id,
                Some(id) => return Err(RegistryError::UnknownLecture(id)),
                None => st.lectures.keys().next_back().map_or(1, |k| k + 1),
            };
            let entry =
                lecture::prepare_lecture(id, input).map_err(RegistryError::InvalidLecture)?;
            Ok((
                vec![Record::LectureSaved {
                    lecture: entry.clone(),
                }],
                entry,
            ))
        })
    }

    // Practice sandboxes

    pub fn sandbox(&self, username: &str) -> Option<TableState> {
        self.state.read().sandboxes.get(&key(username)).cloned()
    }

    /// Runs a practice query on the caller's own table under the PRACTICE
    /// policy. Successful changes are persisted.
    pub fn practice(&self, username: &str, text: &str) -> Result<ExecOutcome, RegistryError> {
        self.commit(|st| {
            let account = st
                .account(username)
                .ok_or_else(|| RegistryError::UnknownUser(username.to_string()))?;
            let table = match st.sandboxes.get(&key(username)) {
                Some(t) => t.clone(),
                None => provision_sandbox(&account.username),
            };
            let mut sandbox = Sandbox {
                owner: account.username.clone(),
                table,
            };
            let before = sandbox.table.clone();
            let outcome = sandbox.run(text)?;
            let records = if sandbox.table != before || !st.sandboxes.contains_key(&key(username)) {
                vec![Record::SandboxSaved {
                    username: account.username.clone(),
                    table: sandbox.table,
                }]
            } else {
                Vec::new()
            };
            Ok((records, outcome))
        })
    }

    pub fn reset_sandbox(&self, username: &str) -> Result<TableState, RegistryError> {
        self.commit(|st| {
            let account = st
                .account(username)
                .ok_or_else(|| RegistryError::UnknownUser(username.to_string()))?;
            let table = provision_sandbox(&account.username);
            Ok((
                vec![Record::SandboxSaved {
                    username: account.username.clone(),
                    table: table.clone(),
                }],
                table,
            ))
        })
    }

    // Question bank

    fn persist_bank(
        &self,
        store: &Option<Store>,
        bank: &QuestionBank,
    ) -> Result<(), RegistryError> {
        if let Some(s) = store {
            let specs: Vec<QuestionSpec> = bank.active().map(|q| q.spec()).collect();
            s.write_questions(&specs)?;
        }
        Ok(())
    }

    /// Adds questions from specs, replacing same-id entries. For loading a
    /// fixture bank; no role check.
    pub fn seed_questions(&self, specs: Vec<QuestionSpec>) -> Result<usize, RegistryError> {
        let questions = specs
            .into_iter()
            .map(ingest_question)
            .collect::<Result<Vec<_>, _>>()?;
        let store = self.store.lock();
        let mut bank = self.bank.write();
        let n = questions.len();
        for q in questions {
            bank.upsert(q);
        }
        self.persist_bank(&store, &bank)?;
        Ok(n)
    }

    pub fn list_questions(&self, admin: &str) -> Result<Vec<QuestionSpec>, RegistryError> {
        self.require_admin(admin)?;
        Ok(self.bank.read().active().map(|q| q.spec()).collect())
    }

    /// Adds a question. An id of 0 means "assign the next free id".
    pub fn add_question(
        &self,
        admin: &str,
        mut spec: QuestionSpec,
    ) -> Result<QuestionSpec, RegistryError> {
        self.require_admin(admin)?;
        let store = self.store.lock();
        let mut bank = self.bank.write();
        if spec.id == 0 {
            spec.id = bank.next_id();
        } else if bank.get(spec.id).is_some() {
            return Err(RegistryError::DuplicateQuestionId(spec.id));
        }
        let q = bank.upsert(ingest_question(spec)?);
        self.persist_bank(&store, &bank)?;
        tracing::info!(id = q.id, admin, "question added");
        Ok(q.spec())
    }

    pub fn edit_question(
        &self,
        admin: &str,
        id: u32,
        mut spec: QuestionSpec,
    ) -> Result<QuestionSpec, RegistryError> {
        self.require_admin(admin)?;
        let store = self.store.lock();
        let mut bank = self.bank.write();
        if !bank.contains(id) {
            return Err(RegistryError::UnknownQuestionId(id));
        }
        spec.id = id;
        let q = bank.upsert(ingest_question(spec)?);
        self.persist_bank(&store, &bank)?;
        Ok(q.spec())
    }

    /// Deletes a question; deferred while a live session holds it.
    pub fn delete_question(&self, admin: &str, id: u32) -> Result<Removal, RegistryError> {
        self.require_admin(admin)?;
        let store = self.store.lock();
        let mut bank = self.bank.write();
        let removal = bank
            .remove(id)
            .map_err(|_| RegistryError::UnknownQuestionId(id))?;
        self.persist_bank(&store, &bank)?;
        Ok(removal)
    }

    pub fn question(&self, id: u32) -> Option<Arc<Question>> {
        self.bank.read().get(id).cloned()
    }

    pub fn question_count(&self) -> usize {
        self.bank.read().len()
    }

    /// Every question currently eligible for new games.
    pub fn question_pool(&self) -> Vec<Arc<Question>> {
        self.bank.read().active().cloned().collect()
    }

    /// Draws a solo set and pins it against deletion until released.
    pub fn draw(&self, mode: SoloMode, seed: u64) -> Result<Vec<Arc<Question>>, RegistryError> {
        let mut bank = self.bank.write();
        let qs = draw_questions(&bank, mode, seed)?;
        bank.pin(qs.iter().map(|q| q.id));
        Ok(qs)
    }

    pub fn release(&self, ids: &[u32]) {
        let _store = self.store.lock();
        let mut bank = self.bank.write();
        let finished = bank.unpin(ids.iter().copied());
        if !finished.is_empty() {
            tracing::info!(?finished, "deferred question deletes completed");
        }
    }

    /// Per-category question counts of the active bank.
    pub fn bank_categories(&self) -> BTreeMap<StatementClass, usize> {
        let mut out = BTreeMap::new();
        for q in self.bank.read().active() {
            *out.entry(q.category).or_insert(0) += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guard::{GradingMode, QuestionSpec};

    fn registry() -> (Registry, Arc<ManualClock>) {
        let clock = Arc::new(ManualClock::new(chrono::Utc::now()));
        let reg = Registry::in_memory(RegistryConfig::fast(), clock.clone());
        reg.create_admin("admin", "adminpass1", ProfileDetails::default())
            .unwrap();
        (reg, clock)
    }

    fn student(reg: &Registry, name: &str) -> Account {
        let code = reg.issue_verification_code("admin").unwrap();
        reg.register_student(name, "password1", &code.code, ProfileDetails::default())
            .unwrap()
    }

    #[test]
    fn code_format_and_single_use() {
        let (reg, _) = registry();
        let code = reg.issue_verification_code("admin").unwrap();
        assert_eq!(code.code.len(), CODE_LEN);
        assert!(code.code.bytes().all(|b| CODE_ALPHABET.contains(&b)));
        reg.register_student("alice", "password1", &code.code, ProfileDetails::default())
            .unwrap();
        assert!(matches!(
            reg.register_student("bob", "password1", &code.code, ProfileDetails::default()),
            Err(RegistryError::BadCode)
        ));
    }

    #[test]
    fn code_expiry_and_admin_only() {
        let (reg, clock) = registry();
        let code = reg.issue_verification_code("admin").unwrap();
        clock.advance(Duration::days(7));
        assert!(matches!(
            reg.register_student("late", "password1", &code.code, ProfileDetails::default()),
            Err(RegistryError::BadCode)
        ));
        student(&reg, "alice");
        assert!(matches!(
            reg.issue_verification_code("alice"),
            Err(RegistryError::NotAdmin)
        ));
    }

    #[test]
    fn registration_errors() {
        let (reg, _) = registry();
        student(&reg, "alice");
        let code = reg.issue_verification_code("admin").unwrap();
        assert!(matches!(
            reg.register_student("ALICE", "password1", &code.code, ProfileDetails::default()),
            Err(RegistryError::UsernameTaken)
        ));
        assert!(matches!(
            reg.register_student("bob", "short", &code.code, ProfileDetails::default()),
            Err(RegistryError::WeakPassword)
        ));
        // a failed attempt does not burn the code
        reg.register_student("bob", "password1", &code.code, ProfileDetails::default())
            .unwrap();
    }

    #[test]
    fn registration_provisions_sandbox_and_login_works() {
        let (reg, _) = registry();
        student(&reg, "201910001");
        assert_eq!(reg.sandbox("201910001").unwrap().name, "201910001_table");
        assert!(reg.authenticate("201910001", "password1").is_ok());
        assert!(matches!(
            reg.authenticate("201910001", "password2"),
            Err(RegistryError::BadCredentials)
        ));
    }

    #[test]
    fn search_is_case_insensitive_and_capped() {
        let (reg, _) = registry();
        student(&reg, "KAguila");
        let hits = reg.search_profiles("agu");
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].username, "KAguila");
        assert!(reg.search_profiles("zzz").is_empty());
        for i in 0..60 {
            student(&reg, &format!("user{i:02}"));
        }
        let all = reg.search_profiles("");
        assert_eq!(all.len(), SEARCH_LIMIT);
        assert!(all
            .windows(2)
            .all(|w| w[0].username.to_lowercase() < w[1].username.to_lowercase()));
    }

    #[test]
    fn leaderboard_order_and_ties() {
        let (reg, clock) = registry();
        for name in ["old", "mid", "new", "low"] {
            student(&reg, name);
            clock.advance(Duration::seconds(1));
        }
        // old and new both finish at 1016 after one win each; low loses twice.
        reg.update_rating(GameMode::MpCompetition, "new", "low")
            .unwrap();
        reg.update_rating(GameMode::MpCompetition, "old", "mid")
            .unwrap();
        let board = reg.leaderboard("MP_COMPETITION", 0).unwrap();
        let names: Vec<&str> = board.iter().map(|e| e.username.as_str()).collect();
        assert_eq!(names, ["old", "new", "mid", "low"]);
        assert_eq!(board[0].rank, 1);
        assert!(reg.leaderboard("MP_COMPETITION", 1).unwrap().is_empty());
        assert!(matches!(
            reg.leaderboard("BOGUS", 0),
            Err(RegistryError::InvalidMode(_))
        ));
    }

    #[test]
    fn question_panel() {
        let (reg, _) = registry();
        student(&reg, "alice");
        let spec = QuestionSpec {
            id: 22,
            text: "Write a query that will delete a table named \"tbl_jobs\"".into(),
            difficulty: 1,
            category: StatementClass::Drop,
            grading_mode: GradingMode::Exact,
            stored_answers: vec!["DROP TABLE tbl_jobs".into()],
            shadow_fixture: None,
            guides: vec![],
        };
        assert!(matches!(
            reg.add_question("alice", spec.clone()),
            Err(RegistryError::NotAdmin)
        ));
        reg.add_question("admin", spec.clone()).unwrap();
        assert!(reg.question(22).is_some());
        let mut bad = spec.clone();
        bad.stored_answers.clear();
        assert!(matches!(
            reg.edit_question("admin", 22, bad),
            Err(RegistryError::InvalidQuestion(_))
        ));
        assert!(matches!(
            reg.delete_question("admin", 99),
            Err(RegistryError::UnknownQuestionId(99))
        ));
        assert_eq!(reg.delete_question("admin", 22).unwrap(), Removal::Removed);
    }

    #[test]
    fn practice_persists_changes() {
        let (reg, _) = registry();
        student(&reg, "alice");
        reg.practice("alice", "DELETE FROM alice_table WHERE id = 1")
            .unwrap();
        assert_eq!(reg.sandbox("alice").unwrap().rows.len(), 2);
        assert!(matches!(
            reg.practice("alice", "DROP TABLE alice_table"),
            Err(RegistryError::Practice(PracticeError::Rejected(_)))
        ));
        reg.reset_sandbox("alice").unwrap();
        assert_eq!(reg.sandbox("alice").unwrap().rows.len(), 3);
    }
}
