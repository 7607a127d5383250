use std::fmt;
use std::sync::Arc;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::guard::{Question, MAX_DIFFICULTY};

use super::{GameError, QuestionBank};

pub const CASUAL_COUNT: usize = 10;
pub const MAX_CUSTOM_COUNT: u8 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SoloMode {
    Casual,
    Custom { count: u8, difficulty: u8 },
}

impl SoloMode {
    pub fn validate(self) -> Result<Self, GameError> {
        if let SoloMode::Custom { count, difficulty } = self {
            if !(1..=MAX_CUSTOM_COUNT).contains(&count) {
                return Err(GameError::InvalidMode(format!(
                    "count must be 1..={MAX_CUSTOM_COUNT}, got {count}"
                )));
            }
            if !(1..=MAX_DIFFICULTY).contains(&difficulty) {
                return Err(GameError::InvalidMode(format!(
                    "difficulty must be 1..={MAX_DIFFICULTY}, got {difficulty}"
                )));
            }
        }
        Ok(self)
    }

    pub fn question_count(self) -> usize {
        match self {
            SoloMode::Casual => CASUAL_COUNT,
            SoloMode::Custom { count, .. } => count as usize,
        }
    }
}

impl fmt::Display for SoloMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SoloMode::Casual => f.write_str("CASUAL"),
            SoloMode::Custom { count, difficulty } => {
                write!(f, "CUSTOM(count={count}, difficulty={difficulty})")
            }
        }
    }
}

/// Uniform draw without replacement. The eligible pool is taken in id
/// order and sampled with a ChaCha8 stream seeded by `seed`, so the same
/// bank, mode and seed always give the same list.
pub fn draw_questions(
    bank: &QuestionBank,
    mode: SoloMode,
    seed: u64,
) -> Result<Vec<Arc<Question>>, GameError> {
    let mode = mode.validate()?;
    let pool: Vec<&Arc<Question>> = match mode {
        SoloMode::Casual => bank.active().collect(),
        SoloMode::Custom { difficulty, .. } => bank
            .active()
            .filter(|q| q.difficulty == difficulty)
            .collect(),
    };
    let needed = mode.question_count();
    if pool.len() < needed {
        return Err(GameError::InsufficientBank {
            needed,
            available: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, pool.len(), needed)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::game::tests::exact_question;

    fn bank(n: u32) -> QuestionBank {
        QuestionBank::from_questions((1..=n).map(|id| exact_question(id, (id % 3 + 1) as u8)))
    }

    #[test]
    fn casual_draws_ten_distinct() {
        let b = bank(30);
        for seed in 0..20 {
            let qs = draw_questions(&b, SoloMode::Casual, seed).unwrap();
            let ids: BTreeSet<u32> = qs.iter().map(|q| q.id).collect();
            assert_eq!(qs.len(), 10);
            assert_eq!(ids.len(), 10);
        }
    }

    #[test]
    fn custom_filters_difficulty() {
        let b = bank(30);
        let qs = draw_questions(
            &b,
            SoloMode::Custom {
                count: 5,
                difficulty: 2,
            },
            9,
        )
        .unwrap();
        assert_eq!(qs.len(), 5);
        assert!(qs.iter().all(|q| q.difficulty == 2));
    }

    #[test]
    fn small_bank_is_insufficient() {
        assert_eq!(
            draw_questions(&bank(7), SoloMode::Casual, 1).unwrap_err(),
            GameError::InsufficientBank {
                needed: 10,
                available: 7
            }
        );
        assert!(matches!(
            draw_questions(
                &bank(30),
                SoloMode::Custom {
                    count: 11,
                    difficulty: 1
                },
                1
            ),
            Err(GameError::InsufficientBank { .. })
        ));
    }

    #[test]
    fn mode_bounds() {
        assert!(SoloMode::Custom {
            count: 0,
            difficulty: 1
        }
        .validate()
        .is_err());
        assert!(SoloMode::Custom {
            count: 51,
            difficulty: 1
        }
        .validate()
        .is_err());
        assert!(SoloMode::Custom {
            count: 5,
            difficulty: 4
        }
        .validate()
        .is_err());
        assert!(SoloMode::Custom {
            count: 50,
            difficulty: 3
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn same_seed_same_draw() {
        let b = bank(30);
        let ids = |seed| -> Vec<u32> {
            draw_questions(&b, SoloMode::Casual, seed)
                .unwrap()
                .iter()
                .map(|q| q.id)
                .collect()
        };
        assert_eq!(ids(42), ids(42));
        assert_ne!(ids(42), ids(43));
    }
}
