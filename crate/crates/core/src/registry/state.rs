use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::game::ScoreReport;
use crate::sql::TableState;

use super::lecture::LectureEntry;
use super::rating::{GameMode, Rating};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Role {
    Student,
    Admin,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDetails {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub program: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub username: String,
    pub password_digest: String,
    pub role: Role,
    pub details: ProfileDetails,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub username: String,
    pub name: String,
    pub program: String,
    pub role: Role,
    pub created_at: DateTime<Utc>,
}

impl Account {
    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            username: self.username.clone(),
            name: self.details.name.clone(),
            program: self.details.program.clone(),
            role: self.role,
            created_at: self.created_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationCode {
    pub code: String,
    pub issued_by: String,
    pub issued_at: DateTime<Utc>,
    pub expires_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consumed_by: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consumed_at: Option<DateTime<Utc>>,
}

impl VerificationCode {
    pub fn usable_at(&self, now: DateTime<Utc>) -> bool {
        self.consumed_by.is_none() && now < self.expires_at
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Solo {
        report: ScoreReport,
    },
    Multiplayer {
        room_id: u64,
        room_name: String,
        placement: u32,
        players: u32,
        champion: String,
        wins: u32,
        losses: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub id: u64,
    pub player: String,
    pub mode: GameMode,
    pub at: DateTime<Utc>,
    pub outcome: Outcome,
}

/// One durable mutation. The live registry and log replay both go through
/// [`RegistryState::apply`], so they cannot drift apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    AccountCreated {
        account: Account,
    },
    CodeIssued {
        code: VerificationCode,
    },
    CodeConsumed {
        code: String,
        by: String,
        at: DateTime<Utc>,
    },
    RatingSet {
        username: String,
        mode: GameMode,
        rating: Rating,
    },
    LectureSaved {
        lecture: LectureEntry,
    },
    GameRecorded {
        record: GameRecord,
    },
    SandboxSaved {
        username: String,
        table: TableState,
    },
}

/// Everything the registry persists except the question bank. Maps are keyed
/// by lower-cased username.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryState {
    pub accounts: BTreeMap<String, Account>,
    pub codes: BTreeMap<String, VerificationCode>,
    pub ratings: BTreeMap<String, BTreeMap<GameMode, Rating>>,
    pub lectures: BTreeMap<u64, LectureEntry>,
    pub records: Vec<GameRecord>,
    pub sandboxes: BTreeMap<String, TableState>,
}

pub fn key(username: &str) -> String {
    username.to_lowercase()
}

impl RegistryState {
    pub fn apply(&mut self, record: &Record) {
        match record {
            Record::AccountCreated { account } => {
                self.accounts
                    .insert(key(&account.username), account.clone());
            }
            Record::CodeIssued { code } => {
                self.codes.insert(code.code.clone(), code.clone());
            }
            Record::CodeConsumed { code, by, at } => {
                if let Some(c) = self.codes.get_mut(code) {
                    c.consumed_by = Some(by.clone());
                    c.consumed_at = Some(*at);
                }
            }
            Record::RatingSet {
                username,
                mode,
                rating,
            } => {
                self.ratings
                    .entry(key(username))
                    .or_default()
                    .insert(*mode, *rating);
            }
            Record::LectureSaved { lecture } => {
                self.lectures.insert(lecture.id, lecture.clone());
            }
            Record::GameRecorded { record } => self.records.push(record.clone()),
            Record::SandboxSaved { username, table } => {
                self.sandboxes.insert(key(username), table.clone());
            }
        }
    }

    pub fn account(&self, username: &str) -> Option<&Account> {
        self.accounts.get(&key(username))
    }

    pub fn rating(&self, username: &str, mode: GameMode) -> Rating {
        self.ratings
            .get(&key(username))
            .and_then(|m| m.get(&mode))
            .copied()
            .unwrap_or_else(|| Rating::initial(mode))
    }
}
