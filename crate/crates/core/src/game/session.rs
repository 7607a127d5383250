use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::guard::{grade, Guide, Question, Verdict};
use crate::sql::StatementClass;

use super::{GameError, SoloMode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", content = "text", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnswerState {
    Unanswered,
    Skipped,
    Answered(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryStat {
    pub attempted: u32,
    pub correct: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionResult {
    pub question_id: u32,
    pub category: StatementClass,
    pub answer: Option<String>,
    /// `None` when the question was skipped or left blank.
    pub verdict: Option<Verdict>,
}

impl QuestionResult {
    pub fn is_correct(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.correct)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub total_correct: u32,
    pub total_questions: u32,
    pub per_question: Vec<QuestionResult>,
    pub category_stats: BTreeMap<StatementClass, CategoryStat>,
}

impl ScoreReport {
    pub fn from_results(per_question: Vec<QuestionResult>) -> Self {
        let mut category_stats: BTreeMap<StatementClass, CategoryStat> = BTreeMap::new();
        let mut total_correct = 0;
        for r in &per_question {
            let stat = category_stats.entry(r.category).or_default();
            stat.attempted += 1;
            if r.is_correct() {
                stat.correct += 1;
                total_correct += 1;
            }
        }
        Self {
            total_correct,
            total_questions: per_question.len() as u32,
            per_question,
            category_stats,
        }
    }
}

/// What a player sees of one drawn question. Answers never leave the server.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionView {
    pub index: usize,
    pub id: u32,
    pub text: String,
    pub difficulty: u8,
    pub category: StatementClass,
    pub guides: Vec<Guide>,
}

impl QuestionView {
    pub fn new(index: usize, q: &Question) -> Self {
        Self {
            index,
            id: q.id,
            text: q.text.clone(),
            difficulty: q.difficulty,
            category: q.category,
            guides: q.guides.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: u64,
    pub player: String,
    pub mode: SoloMode,
    pub questions: Vec<QuestionView>,
    pub answers: Vec<AnswerState>,
    pub submitted: bool,
    pub started_at: DateTime<Utc>,
    pub submitted_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone)]
pub struct SoloSession {
    pub id: u64,
    pub player: String,
    pub mode: SoloMode,
    questions: Vec<Arc<Question>>,
    answers: Vec<AnswerState>,
    submitted_at: Option<DateTime<Utc>>,
    pub started_at: DateTime<Utc>,
}

impl SoloSession {
    pub fn new(
        id: u64,
        player: &str,
        mode: SoloMode,
        questions: Vec<Arc<Question>>,
        now: DateTime<Utc>,
    ) -> Self {
        let answers = vec![AnswerState::Unanswered; questions.len()];
        Self {
            id,
            player: player.to_string(),
            mode,
            questions,
            answers,
            submitted_at: None,
            started_at: now,
        }
    }

    pub fn questions(&self) -> &[Arc<Question>] {
        &self.questions
    }

    pub fn question_ids(&self) -> Vec<u32> {
        self.questions.iter().map(|q| q.id).collect()
    }

    pub fn answers(&self) -> &[AnswerState] {
        &self.answers
    }

    pub fn submitted(&self) -> bool {
        self.submitted_at.is_some()
    }

    fn slot(&mut self, index: usize) -> Result<&mut AnswerState, GameError> {
        if self.submitted() {
            return Err(GameError::AlreadySubmitted);
        }
        let len = self.answers.len();
        self.answers
            .get_mut(index)
            .ok_or(GameError::IndexOutOfRange { index, len })
    }

    pub fn answer(&mut self, index: usize, text: &str) -> Result<(), GameError> {
        *self.slot(index)? = AnswerState::Answered(text.to_string());
        Ok(())
    }

    pub fn skip(&mut self, index: usize) -> Result<(), GameError> {
        *self.slot(index)? = AnswerState::Skipped;
        Ok(())
    }

    /// Grades every answered question and freezes the session. Skipped and
    /// blank questions count as attempted and incorrect.
    pub fn submit_all(&mut self, now: DateTime<Utc>) -> Result<ScoreReport, GameError> {
        if self.submitted() {
            return Err(GameError::AlreadySubmitted);
        }
        self.submitted_at = Some(now);
        let results = self
            .questions
            .iter()
            .zip(&self.answers)
            .map(|(q, a)| {
                let (answer, verdict) = match a {
                    AnswerState::Answered(text) => (Some(text.clone()), Some(grade(q, text))),
                    _ => (None, None),
                };
                QuestionResult {
                    question_id: q.id,
                    category: q.category,
                    answer,
                    verdict,
                }
            })
            .collect();
        let report = ScoreReport::from_results(results);
        tracing::debug!(
            session = self.id,
            player = %self.player,
            correct = report.total_correct,
            "solo session submitted"
        );
        Ok(report)
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id,
            player: self.player.clone(),
            mode: self.mode,
            questions: self
                .questions
                .iter()
                .enumerate()
                .map(|(i, q)| QuestionView::new(i, q))
                .collect(),
            answers: self.answers.clone(),
            submitted: self.submitted(),
            started_at: self.started_at,
            submitted_at: self.submitted_at,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tests::exact_question;

    fn session(n: u32) -> SoloSession {
        let qs = (1..=n).map(|id| Arc::new(exact_question(id, 1))).collect();
        SoloSession::new(1, "p", SoloMode::Casual, qs, Utc::now())
    }

    #[test]
    fn skip_then_answer() {
        let mut s = session(3);
        s.skip(2).unwrap();
        assert_eq!(s.answers()[2], AnswerState::Skipped);
        s.answer(2, "DROP TABLE t3").unwrap();
        assert_eq!(
            s.answers()[2],
            AnswerState::Answered("DROP TABLE t3".into())
        );
    }

    #[test]
    fn last_write_wins() {
        let mut s = session(2);
        s.answer(1, "a").unwrap();
        s.answer(1, "b").unwrap();
        assert_eq!(s.answers()[1], AnswerState::Answered("b".into()));
    }

    #[test]
    fn frozen_after_submit() {
        let mut s = session(2);
        s.submit_all(Utc::now()).unwrap();
        assert_eq!(s.answer(0, "x"), Err(GameError::AlreadySubmitted));
        assert_eq!(s.skip(0), Err(GameError::AlreadySubmitted));
        assert_eq!(s.submit_all(Utc::now()), Err(GameError::AlreadySubmitted));
    }

    #[test]
    fn out_of_range() {
        let mut s = session(2);
        assert_eq!(
            s.answer(2, "x"),
            Err(GameError::IndexOutOfRange { index: 2, len: 2 })
        );
    }

    #[test]
    fn scoring_counts_correct_and_categories() {
        let mut s = session(10);
        for i in 0..7 {
            s.answer(i, &format!("drop table T{};", i + 1)).unwrap();
        }
        s.answer(7, "DROP TABLE wrong").unwrap();
        s.skip(8).unwrap();
        let r = s.submit_all(Utc::now()).unwrap();
        assert_eq!(r.total_correct, 7);
        assert_eq!(r.total_questions, 10);
        assert_eq!(
            r.category_stats[&StatementClass::Drop],
            CategoryStat {
                attempted: 10,
                correct: 7
            }
        );
        assert!(r.per_question[8].verdict.is_none());
        assert!(r.per_question[9].verdict.is_none());
    }

    #[test]
    fn all_skipped_scores_zero() {
        let mut s = session(4);
        for i in 0..4 {
            s.skip(i).unwrap();
        }
        let r = s.submit_all(Utc::now()).unwrap();
        assert_eq!(r.total_correct, 0);
        assert_eq!(r.category_stats[&StatementClass::Drop].attempted, 4);
    }
}
