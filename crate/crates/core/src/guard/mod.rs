//! Query policy and answer grading.
//!
//! Every piece of student SQL passes through [`sanitize`] before it reaches
//! an engine. Answers are then graded either by normalised string match
//! ([`grade_exact`]) or by a blind test on a shadow table ([`grade_shadow`]).

mod grade;
mod normalize;
mod policy;
mod question;

pub use grade::{grade, grade_exact, grade_shadow, Verdict, VerdictReason};
pub use normalize::normalize;
pub use policy::{sanitize, PolicyMode, RejectReason, Rejection};
pub use question::{
    ingest_question, GradingMode, Guide, InvalidQuestion, Question, QuestionSpec, ShadowFixture,
    ShadowFixtureSpec, MAX_DIFFICULTY,
};
