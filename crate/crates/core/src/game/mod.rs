//! Solo play: the question bank, seeded draws, sessions with skip and
//! revise, score reports, and per-player practice sandboxes.

mod bank;
mod draw;
mod sandbox;
mod session;

use thiserror::Error;

pub use bank::{QuestionBank, Removal};
pub use draw::{draw_questions, SoloMode, CASUAL_COUNT, MAX_CUSTOM_COUNT};
pub use sandbox::{provision_sandbox, sandbox_name, PracticeError, Sandbox};
pub use session::{
    AnswerState, CategoryStat, QuestionResult, QuestionView, ScoreReport, SessionView, SoloSession,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("question bank has {available} eligible questions, {needed} needed")]
    InsufficientBank { needed: usize, available: usize },
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("session already submitted")]
    AlreadySubmitted,
    #[error("question index {index} out of range (session has {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown question id {0}")]
    UnknownQuestionId(u32),
}

#[cfg(test)]
pub(crate) mod tests {
    use crate::guard::{ingest_question, GradingMode, Question, QuestionSpec};
    use crate::sql::StatementClass;

    /// An EXACT question whose only answer is `DROP TABLE t{id}`.
    pub fn exact_question(id: u32, difficulty: u8) -> Question {
        ingest_question(QuestionSpec {
            id,
            text: format!("drop t{id}"),
            difficulty,
            category: StatementClass::Drop,
            grading_mode: GradingMode::Exact,
            stored_answers: vec![format!("DROP TABLE t{id}")],
            shadow_fixture: None,
            guides: vec![],
        })
        .unwrap()
    }
}
