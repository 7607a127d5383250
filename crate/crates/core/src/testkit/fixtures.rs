use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::game::QuestionBank;
use crate::guard::{ingest_question, QuestionSpec};
use crate::registry::read_questions;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load_bank_specs() -> Vec<QuestionSpec> {
    read_questions(&fixture_dir().join("questions.ndjson")).expect("fixture bank parses")
}

pub fn load_bank() -> QuestionBank {
    QuestionBank::from_questions(
        load_bank_specs()
            .into_iter()
            .map(|s| ingest_question(s).expect("fixture question is valid")),
    )
}

/// Candidates for one SHADOW question: answers that must grade correct, and
/// answers that copy or fake the visible data and must grade incorrect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindCase {
    pub question_id: u32,
    pub correct: Vec<String>,
    pub fabricated: Vec<String>,
}

pub fn load_blind_cases() -> Vec<BlindCase> {
    let text = std::fs::read_to_string(fixture_dir().join("blind_tests.json"))
        .expect("blind test fixture exists");
    serde_json::from_str(&text).expect("blind test fixture parses")
}

/// A wrong answer to an EXACT question that differs only slightly from an
/// accepted one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearMiss {
    pub question_id: u32,
    pub text: String,
}

pub fn load_near_misses() -> Vec<NearMiss> {
    let text = std::fs::read_to_string(fixture_dir().join("exact_near_misses.json"))
        .expect("near-miss fixture exists");
    serde_json::from_str(&text).expect("near-miss fixture parses")
}
