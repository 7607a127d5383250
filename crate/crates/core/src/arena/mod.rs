//! Real-time multiplayer rooms: roster and chat, seeded single or double
//! elimination brackets, timed rounds won by the first correct answer.
//!
//! A [`Room`] is a plain state machine. The caller serialises commands into
//! it and supplies the clock; the room never spawns tasks or reads time.

mod bracket;
mod room;
mod round;

use thiserror::Error;

pub use bracket::{Bracket, BracketMatch, EliminationMode, Entrant, MatchId, MatchStatus, Side};
pub use room::{
    Audience, ChatMessage, LiveRoundView, LoggedCommand, MatchRecord, MemberRole, Outbound, Room,
    RoomCommand, RoomConfig, RoomEvent, RoomSnapshot, RoomState, RoomSummary, RoomType,
    RoundEndReason, DEFAULT_ROUND_SECS, MAX_CHAT_CHARS, MAX_PLAYERS, MAX_REPLAYS,
};
pub use round::{MatchRound, Submission};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("invalid room configuration: {0}")]
    InvalidConfig(String),
    #[error("the game has already started")]
    RoomRunning,
    #[error("this room does not allow spectators")]
    SpectatorsDisabled,
    #[error("already in this room")]
    AlreadyJoined,
    #[error("the room is full")]
    RoomFull,
    #[error("only the room creator can start the game")]
    NotCreator,
    #[error("at least two players are needed")]
    NotEnoughPlayers,
    #[error("not a participant of this match")]
    NotParticipant,
    #[error("the round was already decided")]
    RoundDecided,
    #[error("the round deadline has passed")]
    PastDeadline,
    #[error("no round is running for you right now")]
    NoActiveRound,
    #[error("the game is not running")]
    GameNotRunning,
    #[error("not a member of this room")]
    NotMember,
    #[error("chat messages are limited to {MAX_CHAT_CHARS} characters")]
    MessageTooLong,
    #[error("match {0} is already resolved")]
    MatchAlreadyResolved(MatchId),
    #[error("match {0} is still waiting for players")]
    MatchNotReady(MatchId),
    #[error("unknown match {0}")]
    UnknownMatch(MatchId),
}

impl ArenaError {
    /// Stable wire code.
    pub fn code(&self) -> &'static str {
        match self {
            ArenaError::InvalidConfig(_) => "INVALID_CONFIG",
            ArenaError::RoomRunning => "ROOM_RUNNING",
            ArenaError::SpectatorsDisabled => "SPECTATORS_DISABLED",
            ArenaError::AlreadyJoined => "ALREADY_JOINED",
            ArenaError::RoomFull => "ROOM_FULL",
            ArenaError::NotCreator => "NOT_CREATOR",
            ArenaError::NotEnoughPlayers => "NOT_ENOUGH_PLAYERS",
            ArenaError::NotParticipant => "NOT_PARTICIPANT",
            ArenaError::RoundDecided => "ALREADY_DECIDED",
            ArenaError::PastDeadline => "PAST_DEADLINE",
            ArenaError::NoActiveRound => "NO_ACTIVE_ROUND",
            ArenaError::GameNotRunning => "GAME_NOT_RUNNING",
            ArenaError::NotMember => "NOT_MEMBER",
            ArenaError::MessageTooLong => "MESSAGE_TOO_LONG",
            ArenaError::MatchAlreadyResolved(_) => "MATCH_ALREADY_RESOLVED",
            ArenaError::MatchNotReady(_) => "MATCH_NOT_READY",
            ArenaError::UnknownMatch(_) => "UNKNOWN_MATCH",
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use chrono::{DateTime, Duration, Utc};

    use super::*;
    use crate::game::tests::exact_question;
    use crate::registry::Role;

    fn pool() -> Vec<Arc<crate::guard::Question>> {
        (1..=12)
            .map(|id| Arc::new(exact_question(id, (id % 2 + 1) as u8)))
            .collect()
    }

    fn room(role: Role, config: RoomConfig) -> Room {
        Room::create(1, "host", role, config, pool()).unwrap()
    }

    fn join(
        r: &mut Room,
        user: &str,
        spectator: bool,
        now: DateTime<Utc>,
    ) -> Result<Vec<Outbound>, ArenaError> {
        r.apply(
            RoomCommand::Join {
                user: user.into(),
                as_spectator: spectator,
            },
            now,
        )
    }

    fn answer_for(r: &Room, user: &str) -> String {
        let (_, round) = r.live_round(user).unwrap();
        round.question.stored_answers[0].clone()
    }

    #[test]
    fn room_type_follows_role() {
        let mut cfg = RoomConfig::new("r");
        assert_eq!(room(Role::Student, cfg.clone()).room_type, RoomType::Casual);
        assert_eq!(
            room(Role::Admin, cfg.clone()).room_type,
            RoomType::Competition
        );
        cfg.round_time_limit = 0;
        assert!(matches!(
            Room::create(1, "h", Role::Student, cfg, pool()),
            Err(ArenaError::InvalidConfig(_))
        ));
    }

    #[test]
    fn roster_rules() {
        let now = Utc::now();
        let mut cfg = RoomConfig::new("r");
        cfg.allow_spectators = false;
        let mut r = room(Role::Student, cfg);
        assert_eq!(
            join(&mut r, "s", true, now).unwrap_err(),
            ArenaError::SpectatorsDisabled
        );
        join(&mut r, "a", false, now).unwrap();
        assert_eq!(
            join(&mut r, "a", false, now).unwrap_err(),
            ArenaError::AlreadyJoined
        );
        assert_eq!(
            r.apply(
                RoomCommand::Start {
                    user: "host".into(),
                    seed: 1
                },
                now
            )
            .unwrap_err(),
            ArenaError::NotEnoughPlayers
        );
        join(&mut r, "b", false, now).unwrap();
        assert_eq!(
            r.apply(
                RoomCommand::Start {
                    user: "a".into(),
                    seed: 1
                },
                now
            )
            .unwrap_err(),
            ArenaError::NotCreator
        );
        r.apply(
            RoomCommand::Start {
                user: "host".into(),
                seed: 1,
            },
            now,
        )
        .unwrap();
        assert_eq!(
            join(&mut r, "c", false, now).unwrap_err(),
            ArenaError::RoomRunning
        );
    }

    #[test]
    fn spectator_mid_game_gets_state_and_is_not_seeded() {
        let now = Utc::now();
        let mut r = room(Role::Student, RoomConfig::new("r"));
        join(&mut r, "a", false, now).unwrap();
        join(&mut r, "b", false, now).unwrap();
        join(&mut r, "watch", true, now).unwrap();
        r.apply(
            RoomCommand::Start {
                user: "host".into(),
                seed: 3,
            },
            now,
        )
        .unwrap();
        assert!(r.bracket().unwrap().seed_of("watch").is_none());
        let out = join(&mut r, "late", true, now).unwrap();
        let state = out
            .iter()
            .find_map(|o| match &o.event {
                RoomEvent::SpectateState(s) => Some(s),
                _ => None,
            })
            .unwrap();
        assert!(state.bracket.is_some());
        assert_eq!(state.live.len(), 1);
        let err = r
            .apply(
                RoomCommand::Answer {
                    user: "watch".into(),
                    text: "x".into(),
                    match_id: None,
                },
                now,
            )
            .unwrap_err();
        assert_eq!(err, ArenaError::NotParticipant);
    }

    #[test]
    fn chat_rules() {
        let now = Utc::now();
        let mut r = room(Role::Student, RoomConfig::new("r"));
        join(&mut r, "a", false, now).unwrap();
        join(&mut r, "s", true, now).unwrap();
        let out = r
            .apply(
                RoomCommand::Chat {
                    user: "a".into(),
                    text: "hi".into(),
                },
                now,
            )
            .unwrap();
        assert_eq!(out[0].audience, Audience::All);
        assert_eq!(
            r.apply(
                RoomCommand::Chat {
                    user: "a".into(),
                    text: "x".repeat(501)
                },
                now
            )
            .unwrap_err(),
            ArenaError::MessageTooLong
        );
        assert!(r
            .apply(
                RoomCommand::Chat {
                    user: "a".into(),
                    text: "x".repeat(500)
                },
                now
            )
            .is_ok());
        assert_eq!(
            r.apply(
                RoomCommand::Chat {
                    user: "z".into(),
                    text: "hi".into()
                },
                now
            )
            .unwrap_err(),
            ArenaError::NotMember
        );
    }

    #[test]
    fn race_first_correct_wins_and_replays() {
        let now = Utc::now();
        let mut r = room(Role::Student, RoomConfig::new("r"));
        join(&mut r, "a", false, now).unwrap();
        join(&mut r, "b", false, now).unwrap();
        r.apply(
            RoomCommand::Start {
                user: "host".into(),
                seed: 9,
            },
            now,
        )
        .unwrap();
        let ans = answer_for(&r, "a");
        let out = r
            .apply(
                RoomCommand::Answer {
                    user: "b".into(),
                    text: ans.clone(),
                    match_id: None,
                },
                now,
            )
            .unwrap();
        assert!(out
            .iter()
            .any(|o| matches!(&o.event, RoomEvent::GameEnd { champion, .. } if champion == "b")));
        assert_eq!(
            r.apply(
                RoomCommand::Answer {
                    user: "a".into(),
                    text: ans,
                    match_id: None
                },
                now
            )
            .unwrap_err(),
            ArenaError::RoundDecided
        );
        let replayed = r.replay();
        assert_eq!(replayed.bracket(), r.bracket());
        assert_eq!(replayed.results(), r.results());
    }

    #[test]
    fn timeouts_replay_then_tiebreak() {
        let now = Utc::now();
        let mut r = room(Role::Student, RoomConfig::new("r"));
        join(&mut r, "a", false, now).unwrap();
        join(&mut r, "b", false, now).unwrap();
        r.apply(
            RoomCommand::Start {
                user: "host".into(),
                seed: 5,
            },
            now,
        )
        .unwrap();
        let bracket = r.bracket().unwrap().clone();
        let (a_seed, b_seed) = (bracket.seed_of("a").unwrap(), bracket.seed_of("b").unwrap());
        let mut t = now;
        for replay in 0..=MAX_REPLAYS {
            // b answers wrong twice per round, a once.
            for (u, n) in [("a", 1), ("b", 2)] {
                for _ in 0..n {
                    r.apply(
                        RoomCommand::Answer {
                            user: u.into(),
                            text: "nope".into(),
                            match_id: None,
                        },
                        t,
                    )
                    .unwrap();
                }
            }
            t += Duration::seconds(121);
            let out = r.apply(RoomCommand::Tick, t).unwrap();
            if replay < MAX_REPLAYS {
                assert!(out
                    .iter()
                    .any(|o| matches!(o.event, RoomEvent::RoundBegin(_))));
                assert!(r.live_round("a").is_some());
            } else {
                assert!(out.iter().any(|o| matches!(&o.event, RoomEvent::RoundEnd { reason: RoundEndReason::Tiebreak, winner: Some(w), .. } if w == "a")));
            }
        }
        assert_eq!(r.bracket().unwrap().champion(), Some(a_seed));
        assert_ne!(a_seed, b_seed);
        assert_eq!(r.state(), RoomState::Finished);
    }

    #[test]
    fn tie_goes_to_lower_seed() {
        let now = Utc::now();
        let mut r = room(Role::Student, RoomConfig::new("r"));
        join(&mut r, "a", false, now).unwrap();
        join(&mut r, "b", false, now).unwrap();
        r.apply(
            RoomCommand::Start {
                user: "host".into(),
                seed: 5,
            },
            now,
        )
        .unwrap();
        let mut t = now;
        while r.state() == RoomState::Running {
            t += Duration::seconds(121);
            r.apply(RoomCommand::Tick, t).unwrap();
        }
        assert_eq!(r.bracket().unwrap().champion(), Some(0));
    }

    #[test]
    fn leaving_forfeits() {
        let now = Utc::now();
        let mut r = room(Role::Student, RoomConfig::new("r"));
        for u in ["a", "b", "c"] {
            join(&mut r, u, false, now).unwrap();
        }
        r.apply(
            RoomCommand::Start {
                user: "host".into(),
                seed: 2,
            },
            now,
        )
        .unwrap();
        let (id, round) = r.live_round("a").or_else(|| r.live_round("b")).unwrap();
        let quitter = r.bracket().unwrap().players[round.players[0]].clone();
        r.apply(
            RoomCommand::Leave {
                user: quitter.clone(),
            },
            now,
        )
        .unwrap();
        let rec = r.results().iter().find(|m| m.match_id == id).unwrap();
        assert_eq!(rec.loser, quitter);
        assert_eq!(rec.reason, RoundEndReason::Forfeit);
    }

    #[test]
    fn late_answer_for_old_match_is_decided() {
        let now = Utc::now();
        let mut cfg = RoomConfig::new("r");
        cfg.elimination_mode = EliminationMode::Double;
        let mut r = room(Role::Student, cfg);
        join(&mut r, "a", false, now).unwrap();
        join(&mut r, "b", false, now).unwrap();
        r.apply(
            RoomCommand::Start {
                user: "host".into(),
                seed: 1,
            },
            now,
        )
        .unwrap();
        let (first, _) = r.live_round("a").unwrap();
        let ans = answer_for(&r, "a");
        r.apply(
            RoomCommand::Answer {
                user: "a".into(),
                text: ans.clone(),
                match_id: Some(first),
            },
            now,
        )
        .unwrap();
        // the grand final is live now; a stale answer tagged with the old match
        assert!(r.live_round("b").is_some());
        assert_eq!(
            r.apply(
                RoomCommand::Answer {
                    user: "b".into(),
                    text: ans,
                    match_id: Some(first)
                },
                now
            )
            .unwrap_err(),
            ArenaError::RoundDecided
        );
    }

    #[test]
    fn event_seq_strictly_increases() {
        let now = Utc::now();
        let mut r = room(Role::Student, RoomConfig::new("r"));
        let mut seqs = Vec::new();
        for u in ["a", "b"] {
            seqs.extend(
                join(&mut r, u, false, now)
                    .unwrap()
                    .into_iter()
                    .map(|o| o.seq),
            );
        }
        seqs.extend(
            r.handle(
                RoomCommand::Start {
                    user: "x".into(),
                    seed: 1,
                },
                now,
            )
            .into_iter()
            .map(|o| o.seq),
        );
        seqs.extend(
            r.apply(
                RoomCommand::Start {
                    user: "host".into(),
                    seed: 1,
                },
                now,
            )
            .unwrap()
            .into_iter()
            .map(|o| o.seq),
        );
        assert!(seqs.windows(2).all(|w| w[0] < w[1]));
    }
}
