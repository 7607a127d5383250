use std::fmt;

use serde::{Deserialize, Serialize};

use super::normalize::normalize;
use super::policy::{sanitize, PolicyMode, RejectReason};
use super::question::{GradingMode, Question};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictReason {
    Matched,
    ResultMatch,
    ResultMismatch,
    PolicyRejected,
    ParseFailed,
    ExecFailed,
}

impl VerdictReason {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictReason::Matched => "MATCHED",
            VerdictReason::ResultMatch => "RESULT_MATCH",
            VerdictReason::ResultMismatch => "RESULT_MISMATCH",
            VerdictReason::PolicyRejected => "POLICY_REJECTED",
            VerdictReason::ParseFailed => "PARSE_FAILED",
            VerdictReason::ExecFailed => "EXEC_FAILED",
        }
    }
}

impl fmt::Display for VerdictReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub correct: bool,
    pub reason: VerdictReason,
    pub detail: String,
}

impl Verdict {
    fn correct(reason: VerdictReason, detail: impl Into<String>) -> Self {
        Self {
            correct: true,
            reason,
            detail: detail.into(),
        }
    }

    fn incorrect(reason: VerdictReason, detail: impl Into<String>) -> Self {
        Self {
            correct: false,
            reason,
            detail: detail.into(),
        }
    }
}

/// Grades by the question's own grading mode.
pub fn grade(question: &Question, candidate: &str) -> Verdict {
    match question.grading_mode {
        GradingMode::Exact => grade_exact(question, candidate),
        GradingMode::Shadow => grade_shadow(question, candidate),
    }
}

pub fn grade_exact(question: &Question, candidate: &str) -> Verdict {
    let normalized = normalize(candidate);
    if question
        .stored_answers
        .iter()
        .any(|answer| normalize(answer) == normalized)
    {
        Verdict::correct(VerdictReason::Matched, "matches a stored answer")
    } else {
        Verdict::incorrect(
            VerdictReason::ResultMismatch,
            "does not match any stored answer",
        )
    }
}

/// Blind test: the candidate runs against hidden data bound under the
/// question's visible table name, and its serialised result must equal the
/// cached reference result.
pub fn grade_shadow(question: &Question, candidate: &str) -> Verdict {
    let stmt = match sanitize(candidate, PolicyMode::ShadowGrade, None) {
        Ok(stmt) => stmt,
        Err(rej) if rej.reason == RejectReason::Parse => {
            return Verdict::incorrect(VerdictReason::ParseFailed, rej.detail)
        }
        Err(rej) => return Verdict::incorrect(VerdictReason::PolicyRejected, rej.to_string()),
    };
    let Some(mut db) = question.grading_database() else {
        return Verdict::incorrect(VerdictReason::ExecFailed, "question has no shadow fixture");
    };
    let outcome = match db.execute(&stmt) {
        Ok(outcome) => outcome,
        Err(err) => return Verdict::incorrect(VerdictReason::ExecFailed, err.to_string()),
    };
    let Some(rs) = outcome.rows() else {
        return Verdict::incorrect(VerdictReason::ExecFailed, "query returned no rows");
    };
    let produced = rs.serialize_as(question.reference_ordered);
    if question.cached_reference_strings.contains(&produced) {
        Verdict::correct(VerdictReason::ResultMatch, "result matches the reference")
    } else {
        Verdict::incorrect(
            VerdictReason::ResultMismatch,
            "result differs from the reference on hidden data",
        )
    }
}
