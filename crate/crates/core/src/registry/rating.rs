use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const ELO_K: f64 = 32.0;
pub const ELO_BASE: i64 = 1000;
pub const LEADERBOARD_PAGE: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GameMode {
    SoloCasual,
    SoloCustom,
    MpCasual,
    MpCompetition,
}

impl GameMode {
    pub const ALL: [GameMode; 4] = [
        GameMode::SoloCasual,
        GameMode::SoloCustom,
        GameMode::MpCasual,
        GameMode::MpCompetition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GameMode::SoloCasual => "SOLO_CASUAL",
            GameMode::SoloCustom => "SOLO_CUSTOM",
            GameMode::MpCasual => "MP_CASUAL",
            GameMode::MpCompetition => "MP_COMPETITION",
        }
    }

    pub fn is_solo(self) -> bool {
        matches!(self, GameMode::SoloCasual | GameMode::SoloCustom)
    }

    /// Solo modes count points from zero; multiplayer modes start at the
    /// Elo base.
    pub fn base_rating(self) -> i64 {
        if self.is_solo() {
            0
        } else {
            ELO_BASE
        }
    }
}

impl fmt::Display for GameMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown game mode '{0}'")]
pub struct UnknownMode(pub String);

impl FromStr for GameMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GameMode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownMode(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rating {
    pub rating: i64,
    pub wins: u32,
    pub losses: u32,
    pub games_played: u32,
}

impl Rating {
    pub fn initial(mode: GameMode) -> Self {
        Self {
            rating: mode.base_rating(),
            wins: 0,
            losses: 0,
            games_played: 0,
        }
    }
}

/// Elo with K = 32. Returns the new (winner, loser) ratings; the loser is
/// floored at zero, so the sum is conserved unless the floor binds.
pub fn elo_update(winner: i64, loser: i64) -> (i64, i64) {
    let expected = 1.0 / (1.0 + 10f64.powf((loser - winner) as f64 / 400.0));
    let delta = (ELO_K * (1.0 - expected)).round() as i64;
    (winner + delta, (loser - delta).max(0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub username: String,
    pub rating: i64,
    pub wins: u32,
    pub losses: u32,
    pub games_played: u32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_match() {
        assert_eq!(elo_update(1000, 1000), (1016, 984));
    }

    #[test]
    fn favourite_wins() {
        assert_eq!(elo_update(1200, 1000), (1208, 992));
    }

    #[test]
    fn floor_at_zero() {
        assert_eq!(elo_update(10, 5).1, 0);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(
            "mp_competition".parse::<GameMode>().unwrap(),
            GameMode::MpCompetition
        );
        assert!("RANKED".parse::<GameMode>().is_err());
        assert_eq!(
            serde_json::to_string(&GameMode::SoloCustom).unwrap(),
            "\"SOLO_CUSTOM\""
        );
    }
}
