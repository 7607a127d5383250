//! Grades DDL/DML answers by normalised string match against the stored
//! answers. Case and whitespace outside literals do not matter; the
//! contents of literals do.

use std::path::Path;

use queryarena::guard::{grade, ingest_question, normalize, GradingMode};
use queryarena::registry::read_questions;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/questions.ndjson");
    let question = read_questions(&path)
        .expect("read fixture questions")
        .into_iter()
        .filter(|s| s.grading_mode == GradingMode::Exact)
        .find(|s| s.stored_answers[0].contains('\''))
        .map(|s| ingest_question(s).expect("valid question"))
        .expect("fixture has an exact question with a literal");
    println!("Q{}: {}", question.id, question.text);
    let stored = &question.stored_answers[0];
    println!("stored: {stored}");
    println!("normalised: {}\n", normalize(stored));

    let shouty = stored.to_uppercase();
    let spaced = format!("  {}  ;", stored.replace(' ', "\n\t "));
    let candidates = [stored.clone(), spaced, shouty];
    for c in &candidates {
        let v = grade(&question, c);
        println!("{:>7} {:?}", if v.correct { "correct" } else { "wrong" }, c);
    }
}
