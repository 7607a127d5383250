use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::guard::{grade, Question, Verdict};

use super::ArenaError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    pub player: usize,
    pub text: String,
    pub arrival_seq: u64,
    pub verdict: Verdict,
}

/// One question put to the two players of a match.
#[derive(Debug, Clone)]
pub struct MatchRound {
    pub players: [usize; 2],
    pub question: Arc<Question>,
    pub deadline: DateTime<Utc>,
    pub submissions: Vec<Submission>,
    pub winner: Option<usize>,
}

impl MatchRound {
    pub fn new(players: [usize; 2], question: Arc<Question>, deadline: DateTime<Utc>) -> Self {
        Self {
            players,
            question,
            deadline,
            submissions: Vec::new(),
            winner: None,
        }
    }

    /// Grades a submission. Callers deliver submissions in arrival order;
    /// the first correct one closes the round in the same step.
    pub fn submit(
        &mut self,
        player: usize,
        text: &str,
        arrival_seq: u64,
        now: DateTime<Utc>,
    ) -> Result<&Submission, ArenaError> {
        if !self.players.contains(&player) {
            return Err(ArenaError::NotParticipant);
        }
        if self.winner.is_some() {
            return Err(ArenaError::RoundDecided);
        }
        if now > self.deadline {
            return Err(ArenaError::PastDeadline);
        }
        if let Some(last) = self.submissions.last() {
            debug_assert!(arrival_seq > last.arrival_seq, "submissions out of order");
        }
        let verdict = grade(&self.question, text);
        if verdict.correct {
            self.winner = Some(player);
        }
        self.submissions.push(Submission {
            player,
            text: text.to_string(),
            arrival_seq,
            verdict,
        });
        Ok(self.submissions.last().expect("just pushed"))
    }

    pub fn wrong_count(&self, player: usize) -> u32 {
        self.submissions
            .iter()
            .filter(|s| s.player == player && !s.verdict.correct)
            .count() as u32
    }
}

#[cfg(test)]
mod tests {
    use chrono::Duration;

    use super::*;
    use crate::game::tests::exact_question;

    fn round() -> (MatchRound, DateTime<Utc>) {
        let now = Utc::now();
        let q = Arc::new(exact_question(22, 1));
        (
            MatchRound::new([0, 1], q, now + Duration::seconds(120)),
            now,
        )
    }

    #[test]
    fn first_correct_wins() {
        let (mut r, now) = round();
        assert!(
            r.submit(0, "DROP TABLE t22", 5, now)
                .unwrap()
                .verdict
                .correct
        );
        assert_eq!(
            r.submit(1, "DROP TABLE t22", 6, now).unwrap_err(),
            ArenaError::RoundDecided
        );
        assert_eq!(r.winner, Some(0));
        assert_eq!(
            r.submissions.iter().filter(|s| s.verdict.correct).count(),
            1
        );
    }

    #[test]
    fn retry_after_wrong() {
        let (mut r, now) = round();
        assert!(
            !r.submit(0, "DROP TABLE nope", 1, now)
                .unwrap()
                .verdict
                .correct
        );
        assert!(
            r.submit(0, "drop table t22;", 2, now)
                .unwrap()
                .verdict
                .correct
        );
        assert_eq!(r.winner, Some(0));
        assert_eq!(r.wrong_count(0), 1);
    }

    #[test]
    fn gates() {
        let (mut r, now) = round();
        assert_eq!(
            r.submit(2, "x", 1, now).unwrap_err(),
            ArenaError::NotParticipant
        );
        assert_eq!(
            r.submit(0, "x", 2, now + Duration::seconds(121))
                .unwrap_err(),
            ArenaError::PastDeadline
        );
    }
}
