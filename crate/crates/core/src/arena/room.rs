use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use chrono::{DateTime, Duration, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::guard::{Guide, Question, VerdictReason};
use crate::registry::Role;

use super::bracket::{Bracket, EliminationMode, MatchId, Side};
use super::round::MatchRound;
use super::ArenaError;

pub const DEFAULT_ROUND_SECS: u32 = 120;
pub const MAX_ROUND_SECS: u32 = 3600;
pub const MAX_CHAT_CHARS: usize = 500;
pub const MAX_PLAYERS: usize = 64;
pub const MAX_REPLAYS: u8 = 3;
const CHAT_KEEP: usize = 1000;
const SNAPSHOT_CHAT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RoomType {
    Casual,
    Competition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RoomState {
    Lobby,
    Running,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomConfig {
    pub name: String,
    #[serde(default = "yes")]
    pub allow_spectators: bool,
    #[serde(default)]
    pub elimination_mode: EliminationMode,
    #[serde(default = "default_round_secs")]
    pub round_time_limit: u32,
}

fn yes() -> bool {
    true
}

fn default_round_secs() -> u32 {
    DEFAULT_ROUND_SECS
}

impl RoomConfig {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            allow_spectators: true,
            elimination_mode: EliminationMode::Single,
            round_time_limit: DEFAULT_ROUND_SECS,
        }
    }

    fn validate(&self) -> Result<(), ArenaError> {
        let name = self.name.trim();
        if name.is_empty() || name.chars().count() > 64 {
            return Err(ArenaError::InvalidConfig(
                "room name must be 1..=64 characters".into(),
            ));
        }
        if !(1..=MAX_ROUND_SECS).contains(&self.round_time_limit) {
            return Err(ArenaError::InvalidConfig(format!(
                "round_time_limit must be 1..={MAX_ROUND_SECS} seconds"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub user: String,
    pub text: String,
    pub at: DateTime<Utc>,
}

/// Everything that can happen to a room. Commands are applied one at a
/// time; each gets the next arrival sequence number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RoomCommand {
    Join {
        user: String,
        as_spectator: bool,
    },
    Leave {
        user: String,
    },
    Chat {
        user: String,
        text: String,
    },
    Start {
        user: String,
        seed: u64,
    },
    Answer {
        user: String,
        text: String,
        #[serde(default)]
        match_id: Option<MatchId>,
    },
    /// Timer check. Only logged when it expired a round.
    Tick,
}

impl RoomCommand {
    pub fn user(&self) -> Option<&str> {
        match self {
            RoomCommand::Join { user, .. }
            | RoomCommand::Leave { user }
            | RoomCommand::Chat { user, .. }
            | RoomCommand::Start { user, .. }
            | RoomCommand::Answer { user, .. } => Some(user),
            RoomCommand::Tick => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedCommand {
    pub arrival_seq: u64,
    pub at: DateTime<Utc>,
    pub command: RoomCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MemberRole {
    Player,
    Spectator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RoundEndReason {
    /// A correct answer arrived first.
    Correct,
    /// Time ran out; a replacement question follows.
    Timeout,
    /// Replays ran out; fewer wrong answers wins, then lower seed.
    Tiebreak,
    /// A player left.
    Forfeit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveRoundView {
    pub match_id: MatchId,
    pub round: u32,
    pub players: [String; 2],
    pub question_id: u32,
    pub question_text: String,
    pub guides: Vec<Guide>,
    pub deadline: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomSnapshot {
    pub id: u64,
    pub name: String,
    pub room_type: RoomType,
    pub creator: String,
    pub state: RoomState,
    pub allow_spectators: bool,
    pub elimination_mode: EliminationMode,
    pub round_time_limit: u32,
    pub players: Vec<String>,
    pub spectators: Vec<String>,
    pub bracket: Option<Bracket>,
    pub live: Vec<LiveRoundView>,
    pub chat: Vec<ChatMessage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomSummary {
    pub id: u64,
    pub name: String,
    pub room_type: RoomType,
    pub creator: String,
    pub state: RoomState,
    pub players: usize,
    pub spectators: usize,
    pub allow_spectators: bool,
    pub elimination_mode: EliminationMode,
    pub round_time_limit: u32,
}

/// A decided match, in the order matches finished.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub match_id: MatchId,
    pub side: Side,
    pub winner: String,
    pub loser: String,
    pub reason: RoundEndReason,
    pub rounds: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum RoomEvent {
    Joined {
        user: String,
        role: MemberRole,
        players: Vec<String>,
        spectators: Vec<String>,
    },
    Leave {
        user: String,
        players: Vec<String>,
        spectators: Vec<String>,
    },
    ChatBroadcast(ChatMessage),
    Bracket(Bracket),
    RoundBegin(LiveRoundView),
    AnswerResult {
        match_id: MatchId,
        player: String,
        correct: bool,
        reason: VerdictReason,
    },
    RoundEnd {
        match_id: MatchId,
        round: u32,
        winner: Option<String>,
        reason: RoundEndReason,
    },
    MatchEnd(MatchRecord),
    GameEnd {
        champion: String,
        standings: Vec<String>,
    },
    SpectateState(Box<RoomSnapshot>),
    Error {
        code: String,
        message: String,
    },
}

impl RoomEvent {
    pub fn type_name(&self) -> &'static str {
        match self {
            RoomEvent::Joined { .. } => "joined",
            RoomEvent::Leave { .. } => "leave",
            RoomEvent::ChatBroadcast(_) => "chat_broadcast",
            RoomEvent::Bracket(_) => "bracket",
            RoomEvent::RoundBegin(_) => "round_begin",
            RoomEvent::AnswerResult { .. } => "answer_result",
            RoomEvent::RoundEnd { .. } => "round_end",
            RoomEvent::MatchEnd(_) => "match_end",
            RoomEvent::GameEnd { .. } => "game_end",
            RoomEvent::SpectateState(_) => "spectate_state",
            RoomEvent::Error { .. } => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Audience {
    All,
    User(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outbound {
    pub seq: u64,
    pub audience: Audience,
    pub event: RoomEvent,
}

#[derive(Debug, Clone)]
struct LiveMatch {
    players: [usize; 2],
    round_no: u32,
    round: MatchRound,
    used: BTreeSet<u32>,
    wrong: [u32; 2],
    replays: u8,
}

#[derive(Debug, Clone)]
struct Origin {
    id: u64,
    creator: String,
    creator_role: Role,
    config: RoomConfig,
    pool: Vec<Arc<Question>>,
}

/// A multiplayer room: a synchronous state machine driven by
/// [`RoomCommand`]s with an injected clock. Replaying its command log into a
/// fresh room reproduces the same bracket and winners.
#[derive(Debug, Clone)]
pub struct Room {
    pub id: u64,
    pub name: String,
    pub room_type: RoomType,
    pub creator: String,
    pub allow_spectators: bool,
    pub elimination_mode: EliminationMode,
    pub round_time_limit: u32,
    players: Vec<String>,
    spectators: BTreeSet<String>,
    chat_log: Vec<ChatMessage>,
    state: RoomState,
    bracket: Option<Bracket>,
    live: BTreeMap<MatchId, LiveMatch>,
    results: Vec<MatchRecord>,
    departed: BTreeSet<usize>,
    rng: ChaCha8Rng,
    arrival_seq: u64,
    event_seq: u64,
    log: Vec<LoggedCommand>,
    origin: Origin,
}

impl Room {
    /// Opens a room in the lobby. The room type follows the creator's role.
    pub fn create(
        id: u64,
        creator: &str,
        creator_role: Role,
        config: RoomConfig,
        pool: Vec<Arc<Question>>,
    ) -> Result<Self, ArenaError> {
        config.validate()?;
        if pool.is_empty() {
            return Err(ArenaError::InvalidConfig("question bank is empty".into()));
        }
        let room_type = match creator_role {
            Role::Admin => RoomType::Competition,
            Role::Student => RoomType::Casual,
        };
        Ok(Self {
            id,
            name: config.name.trim().to_string(),
            room_type,
            creator: creator.to_string(),
            allow_spectators: config.allow_spectators,
            elimination_mode: config.elimination_mode,
            round_time_limit: config.round_time_limit,
            players: Vec::new(),
            spectators: BTreeSet::new(),
            chat_log: Vec::new(),
            state: RoomState::Lobby,
            bracket: None,
            live: BTreeMap::new(),
            results: Vec::new(),
            departed: BTreeSet::new(),
            rng: ChaCha8Rng::seed_from_u64(0),
            arrival_seq: 0,
            event_seq: 0,
            log: Vec::new(),
            origin: Origin {
                id,
                creator: creator.to_string(),
                creator_role,
                config,
                pool,
            },
        })
    }

    pub fn state(&self) -> RoomState {
        self.state
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn spectators(&self) -> impl Iterator<Item = &String> {
        self.spectators.iter()
    }

    pub fn chat_log(&self) -> &[ChatMessage] {
        &self.chat_log
    }

    pub fn bracket(&self) -> Option<&Bracket> {
        self.bracket.as_ref()
    }

    pub fn results(&self) -> &[MatchRecord] {
        &self.results
    }

    pub fn log(&self) -> &[LoggedCommand] {
        &self.log
    }

    pub fn is_member(&self, user: &str) -> bool {
        self.players.iter().any(|p| p == user) || self.spectators.contains(user)
    }

    /// Applies a command, turning a refusal into an `error` event for the
    /// sender.
    pub fn handle(&mut self, command: RoomCommand, now: DateTime<Utc>) -> Vec<Outbound> {
        let user = command.user().map(str::to_string);
        match self.apply(command, now) {
            Ok(out) => out,
            Err(err) => {
                let event = RoomEvent::Error {
                    code: err.code().to_string(),
                    message: err.to_string(),
                };
                match user {
                    Some(u) => vec![self.emit(Audience::User(u), event)],
                    None => Vec::new(),
                }
            }
        }
    }

    pub fn apply(
        &mut self,
        command: RoomCommand,
        now: DateTime<Utc>,
    ) -> Result<Vec<Outbound>, ArenaError> {
        if command == RoomCommand::Tick {
            let expired = self.live.values().any(|m| now > m.round.deadline);
            if !expired {
                return Ok(Vec::new());
            }
        }
        self.arrival_seq += 1;
        let seq = self.arrival_seq;
        self.log.push(LoggedCommand {
            arrival_seq: seq,
            at: now,
            command: command.clone(),
        });
        let mut out = Vec::new();
        match command {
            RoomCommand::Join { user, as_spectator } => self.join(&user, as_spectator, &mut out)?,
            RoomCommand::Leave { user } => self.leave(&user, now, &mut out)?,
            RoomCommand::Chat { user, text } => self.chat(&user, text, now, &mut out)?,
            RoomCommand::Start { user, seed } => self.start(&user, seed, now, &mut out)?,
            RoomCommand::Answer {
                user,
                text,
                match_id,
            } => self.answer(&user, &text, match_id, seq, now, &mut out)?,
            RoomCommand::Tick => self.tick(now, &mut out),
        }
        Ok(out)
    }

    /// A fresh room fed this room's command log.
    pub fn replay(&self) -> Room {
        let o = &self.origin;
        let mut room = Room::create(
            o.id,
            &o.creator,
            o.creator_role,
            o.config.clone(),
            o.pool.clone(),
        )
        .expect("origin was valid");
        for entry in &self.log {
            room.handle(entry.command.clone(), entry.at);
        }
        room
    }

    /// An `error` event for one user that did not come from a command, such
    /// as a malformed message caught by the transport. It takes the next seq.
    pub fn reject(&mut self, user: &str, code: &str, message: &str) -> Outbound {
        self.emit(
            Audience::User(user.to_string()),
            RoomEvent::Error {
                code: code.to_string(),
                message: message.to_string(),
            },
        )
    }

    /// A `spectate_state` resync for one user, e.g. after a reconnect.
    pub fn resync(&mut self, user: &str) -> Outbound {
        let snapshot = RoomEvent::SpectateState(Box::new(self.snapshot()));
        self.emit(Audience::User(user.to_string()), snapshot)
    }

    fn emit(&mut self, audience: Audience, event: RoomEvent) -> Outbound {
        self.event_seq += 1;
        Outbound {
            seq: self.event_seq,
            audience,
            event,
        }
    }

    fn push(&mut self, out: &mut Vec<Outbound>, audience: Audience, event: RoomEvent) {
        let o = self.emit(audience, event);
        out.push(o);
    }

    fn roster(&self) -> (Vec<String>, Vec<String>) {
        (
            self.players.clone(),
            self.spectators.iter().cloned().collect(),
        )
    }

    fn join(
        &mut self,
        user: &str,
        as_spectator: bool,
        out: &mut Vec<Outbound>,
    ) -> Result<(), ArenaError> {
        if self.is_member(user) {
            return Err(ArenaError::AlreadyJoined);
        }
        if as_spectator {
            if !self.allow_spectators {
                return Err(ArenaError::SpectatorsDisabled);
            }
            self.spectators.insert(user.to_string());
        } else {
            if self.state != RoomState::Lobby {
                return Err(ArenaError::RoomRunning);
            }
            if self.players.len() >= MAX_PLAYERS {
                return Err(ArenaError::RoomFull);
            }
            self.players.push(user.to_string());
        }
        let (players, spectators) = self.roster();
        let role = if as_spectator {
            MemberRole::Spectator
        } else {
            MemberRole::Player
        };
        self.push(
            out,
            Audience::All,
            RoomEvent::Joined {
                user: user.to_string(),
                role,
                players,
                spectators,
            },
        );
        let snapshot = RoomEvent::SpectateState(Box::new(self.snapshot()));
        self.push(out, Audience::User(user.to_string()), snapshot);
        Ok(())
    }

    fn leave(
        &mut self,
        user: &str,
        now: DateTime<Utc>,
        out: &mut Vec<Outbound>,
    ) -> Result<(), ArenaError> {
        if self.spectators.remove(user) {
        } else if let Some(pos) = self.players.iter().position(|p| p == user) {
            match self.state {
                RoomState::Lobby => {
                    self.players.remove(pos);
                }
                RoomState::Running => {
                    let seed = self.seed_of(user).expect("players are seeded");
                    if !self.departed.insert(seed) {
                        return Err(ArenaError::NotMember);
                    }
                }
                RoomState::Finished => {}
            }
        } else {
            return Err(ArenaError::NotMember);
        }
        let (players, spectators) = self.roster();
        self.push(
            out,
            Audience::All,
            RoomEvent::Leave {
                user: user.to_string(),
                players,
                spectators,
            },
        );
        if self.state == RoomState::Running {
            let seed = self.seed_of(user);
            let live = self
                .live
                .iter()
                .find(|(_, m)| seed.is_some_and(|s| m.players.contains(&s)))
                .map(|(id, _)| *id);
            if let Some(id) = live {
                let m = self.live.remove(&id).expect("found above");
                let winner = if Some(m.players[0]) == seed {
                    m.players[1]
                } else {
                    m.players[0]
                };
                self.conclude(id, m, winner, RoundEndReason::Forfeit, now, out);
            }
        }
        Ok(())
    }

    fn chat(
        &mut self,
        user: &str,
        text: String,
        now: DateTime<Utc>,
        out: &mut Vec<Outbound>,
    ) -> Result<(), ArenaError> {
        if !self.is_member(user) && user != self.creator {
            return Err(ArenaError::NotMember);
        }
        if text.chars().count() > MAX_CHAT_CHARS {
            return Err(ArenaError::MessageTooLong);
        }
        let msg = ChatMessage {
            user: user.to_string(),
            text,
            at: now,
        };
        self.chat_log.push(msg.clone());
        if self.chat_log.len() > CHAT_KEEP {
            self.chat_log.remove(0);
        }
        self.push(out, Audience::All, RoomEvent::ChatBroadcast(msg));
        Ok(())
    }

    fn start(
        &mut self,
        user: &str,
        seed: u64,
        now: DateTime<Utc>,
        out: &mut Vec<Outbound>,
    ) -> Result<(), ArenaError> {
        if user != self.creator {
            return Err(ArenaError::NotCreator);
        }
        if self.state != RoomState::Lobby {
            return Err(ArenaError::RoomRunning);
        }
        if self.players.len() < 2 {
            return Err(ArenaError::NotEnoughPlayers);
        }
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seeded = self.players.clone();
        seeded.shuffle(&mut self.rng);
        self.bracket = Some(Bracket::new(self.elimination_mode, seeded)?);
        self.state = RoomState::Running;
        tracing::info!(
            room = self.id,
            players = self.players.len(),
            seed,
            "game started"
        );
        let bracket = self.bracket.clone().expect("just set");
        self.push(out, Audience::All, RoomEvent::Bracket(bracket));
        self.launch_ready(now, out);
        Ok(())
    }

    fn answer(
        &mut self,
        user: &str,
        text: &str,
        match_id: Option<MatchId>,
        arrival_seq: u64,
        now: DateTime<Utc>,
        out: &mut Vec<Outbound>,
    ) -> Result<(), ArenaError> {
        if self.state == RoomState::Lobby {
            return Err(ArenaError::GameNotRunning);
        }
        let seed = self.seed_of(user).ok_or(ArenaError::NotParticipant)?;
        let live_id = self
            .live
            .iter()
            .find(|(_, m)| m.players.contains(&seed))
            .map(|(id, _)| *id);
        let played_before = self
            .results
            .iter()
            .any(|r| r.winner == user || r.loser == user);
        let id = match (live_id, match_id) {
            (Some(live), Some(wanted)) if live != wanted => return Err(ArenaError::RoundDecided),
            (Some(live), _) => live,
            (None, _) if played_before => return Err(ArenaError::RoundDecided),
            (None, _) if self.state == RoomState::Finished => {
                return Err(ArenaError::GameNotRunning)
            }
            (None, _) => return Err(ArenaError::NoActiveRound),
        };
        let m = self.live.get_mut(&id).expect("live id");
        let verdict = m
            .round
            .submit(seed, text, arrival_seq, now)?
            .verdict
            .clone();
        let slot = usize::from(m.players[1] == seed);
        if !verdict.correct {
            m.wrong[slot] += 1;
        }
        self.push(
            out,
            Audience::All,
            RoomEvent::AnswerResult {
                match_id: id,
                player: user.to_string(),
                correct: verdict.correct,
                reason: verdict.reason,
            },
        );
        if verdict.correct {
            let m = self.live.remove(&id).expect("live id");
            self.conclude(id, m, seed, RoundEndReason::Correct, now, out);
        }
        Ok(())
    }

    fn tick(&mut self, now: DateTime<Utc>, out: &mut Vec<Outbound>) {
        let expired: Vec<MatchId> = self
            .live
            .iter()
            .filter(|(_, m)| now > m.round.deadline)
            .map(|(id, _)| *id)
            .collect();
        for id in expired {
            self.resolve_timeout(id, now, out);
        }
    }

    /// Replays the match with a fresh question of the same difficulty, up to
    /// [`MAX_REPLAYS`] times; after that the player with fewer wrong answers
    /// wins, ties going to the lower seed.
    fn resolve_timeout(&mut self, id: MatchId, now: DateTime<Utc>, out: &mut Vec<Outbound>) {
        let m = self.live.get(&id).expect("expired id is live");
        let difficulty = m.round.question.difficulty;
        let round_no = m.round_no;
        let can_replay = m.replays < MAX_REPLAYS;
        let used = m.used.clone();
        let replacement = if can_replay {
            self.pick_question(&used, Some(difficulty))
        } else {
            None
        };
        match replacement {
            Some(q) => {
                self.push(
                    out,
                    Audience::All,
                    RoomEvent::RoundEnd {
                        match_id: id,
                        round: round_no,
                        winner: None,
                        reason: RoundEndReason::Timeout,
                    },
                );
                let deadline = self.deadline(now);
                let m = self.live.get_mut(&id).expect("live id");
                m.replays += 1;
                m.round_no += 1;
                m.used.insert(q.id);
                m.round = MatchRound::new(m.players, q, deadline);
                let view = self.round_view(id);
                self.push(out, Audience::All, RoomEvent::RoundBegin(view));
            }
            None => {
                let m = self.live.remove(&id).expect("live id");
                let [a, b] = m.players;
                let winner = match m.wrong[0].cmp(&m.wrong[1]) {
                    std::cmp::Ordering::Less => a,
                    std::cmp::Ordering::Greater => b,
                    std::cmp::Ordering::Equal => a.min(b),
                };
                self.conclude(id, m, winner, RoundEndReason::Tiebreak, now, out);
            }
        }
    }

    fn conclude(
        &mut self,
        id: MatchId,
        m: LiveMatch,
        winner: usize,
        reason: RoundEndReason,
        now: DateTime<Utc>,
        out: &mut Vec<Outbound>,
    ) {
        let bracket = self.bracket.as_mut().expect("running room has a bracket");
        let loser = if m.players[0] == winner {
            m.players[1]
        } else {
            m.players[0]
        };
        bracket
            .record(id, winner)
            .expect("live matches are ready in the bracket");
        let side = bracket.get(id).expect("recorded").side;
        let winner_name = bracket.players[winner].clone();
        let loser_name = bracket.players[loser].clone();
        self.push(
            out,
            Audience::All,
            RoomEvent::RoundEnd {
                match_id: id,
                round: m.round_no,
                winner: Some(winner_name.clone()),
                reason,
            },
        );
        let record = MatchRecord {
            match_id: id,
            side,
            winner: winner_name,
            loser: loser_name,
            reason,
            rounds: m.round_no,
        };
        self.results.push(record.clone());
        self.push(out, Audience::All, RoomEvent::MatchEnd(record));

        let bracket = self.bracket.clone().expect("running room has a bracket");
        self.push(out, Audience::All, RoomEvent::Bracket(bracket.clone()));
        if let Some(champion) = bracket.champion_name() {
            self.state = RoomState::Finished;
            let standings = bracket
                .standings()
                .into_iter()
                .map(|p| bracket.players[p].clone())
                .collect();
            tracing::info!(room = self.id, champion, "game finished");
            self.push(
                out,
                Audience::All,
                RoomEvent::GameEnd {
                    champion: champion.to_string(),
                    standings,
                },
            );
        } else {
            self.launch_ready(now, out);
        }
    }

    /// Starts a round for every ready match not yet live. Matches involving
    /// a departed player are forfeited on the spot.
    fn launch_ready(&mut self, now: DateTime<Utc>, out: &mut Vec<Outbound>) {
        loop {
            if self.state != RoomState::Running {
                return;
            }
            let bracket = self.bracket.as_ref().expect("running room has a bracket");
            let next = bracket
                .ready()
                .into_iter()
                .find(|id| !self.live.contains_key(id));
            let Some(id) = next else {
                return;
            };
            let players = bracket.get(id).and_then(|m| m.players()).expect("ready");
            let gone = players.map(|p| self.departed.contains(&p));
            let q = self
                .pick_question(&BTreeSet::new(), None)
                .expect("pool is never empty");
            let mut used = BTreeSet::new();
            used.insert(q.id);
            let live = LiveMatch {
                players,
                round_no: 1,
                round: MatchRound::new(players, q, self.deadline(now)),
                used,
                wrong: [0, 0],
                replays: 0,
            };
            if gone[0] || gone[1] {
                let winner = match gone {
                    [true, false] => players[1],
                    [false, true] => players[0],
                    _ => players[0].min(players[1]),
                };
                self.conclude(id, live, winner, RoundEndReason::Forfeit, now, out);
                continue;
            }
            self.live.insert(id, live);
            let view = self.round_view(id);
            self.push(out, Audience::All, RoomEvent::RoundBegin(view));
        }
    }

    fn pick_question(
        &mut self,
        used: &BTreeSet<u32>,
        difficulty: Option<u8>,
    ) -> Option<Arc<Question>> {
        let candidates: Vec<&Arc<Question>> = self
            .origin
            .pool
            .iter()
            .filter(|q| !used.contains(&q.id))
            .filter(|q| difficulty.is_none_or(|d| q.difficulty == d))
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let i = self.rng.random_range(0..candidates.len());
        Some(candidates[i].clone())
    }

    fn deadline(&self, now: DateTime<Utc>) -> DateTime<Utc> {
        now + Duration::seconds(i64::from(self.round_time_limit))
    }

    fn seed_of(&self, user: &str) -> Option<usize> {
        self.bracket.as_ref().and_then(|b| b.seed_of(user))
    }

    fn round_view(&self, id: MatchId) -> LiveRoundView {
        let m = &self.live[&id];
        let bracket = self.bracket.as_ref().expect("running room has a bracket");
        LiveRoundView {
            match_id: id,
            round: m.round_no,
            players: m.players.map(|p| bracket.players[p].clone()),
            question_id: m.round.question.id,
            question_text: m.round.question.text.clone(),
            guides: m.round.question.guides.clone(),
            deadline: m.round.deadline,
        }
    }

    /// The live match a player is in, with its current round.
    pub fn live_round(&self, user: &str) -> Option<(MatchId, &MatchRound)> {
        let seed = self.seed_of(user)?;
        self.live
            .iter()
            .find(|(_, m)| m.players.contains(&seed))
            .map(|(id, m)| (*id, &m.round))
    }

    pub fn next_deadline(&self) -> Option<DateTime<Utc>> {
        self.live.values().map(|m| m.round.deadline).min()
    }

    pub fn snapshot(&self) -> RoomSnapshot {
        let skip = self.chat_log.len().saturating_sub(SNAPSHOT_CHAT);
        RoomSnapshot {
            id: self.id,
            name: self.name.clone(),
            room_type: self.room_type,
            creator: self.creator.clone(),
            state: self.state,
            allow_spectators: self.allow_spectators,
            elimination_mode: self.elimination_mode,
            round_time_limit: self.round_time_limit,
            players: self.players.clone(),
            spectators: self.spectators.iter().cloned().collect(),
            bracket: self.bracket.clone(),
            live: self.live.keys().map(|id| self.round_view(*id)).collect(),
            chat: self.chat_log[skip..].to_vec(),
        }
    }

    pub fn summary(&self) -> RoomSummary {
        RoomSummary {
            id: self.id,
            name: self.name.clone(),
            room_type: self.room_type,
            creator: self.creator.clone(),
            state: self.state,
            players: self.players.len(),
            spectators: self.spectators.len(),
            allow_spectators: self.allow_spectators,
            elimination_mode: self.elimination_mode,
            round_time_limit: self.round_time_limit,
        }
    }
}
