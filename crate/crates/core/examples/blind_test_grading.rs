//! Grades SELECT answers by running them against hidden shadow data.
//!
//! Answers that only reproduce the visible sample (literal rows, filters on
//! visible ids) come out wrong because the grading table holds other rows.

use std::path::Path;

use queryarena::guard::{grade, ingest_question, GradingMode};
use queryarena::registry::read_questions;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/questions.ndjson");
    let specs = read_questions(&path).expect("read fixture questions");
    let spec = specs
        .into_iter()
        .find(|s| {
            s.grading_mode == GradingMode::Shadow
                && s.shadow_fixture
                    .as_ref()
                    .is_some_and(|f| f.visible_name == "tbl_products")
        })
        .expect("fixture has the products question");
    let question = ingest_question(spec).expect("valid question");
    println!("Q{}: {}\n", question.id, question.text);

    let reference = question.stored_answers[0].clone();
    let candidates = [
        reference.as_str(),
        "select PRODUCT_NAME from TBL_PRODUCTS where NOT price <= 500",
        "SELECT 'Laptop' AS product_name",
        "SELECT product_name FROM tbl_products WHERE product_name = 'Laptop' OR product_name = 'Printer'",
        "SELECT product_name FROM tbl_products WHERE price >= 500",
        "DELETE FROM tbl_products",
    ];
    for c in candidates {
        let v = grade(&question, c);
        let mark = if v.correct { "correct" } else { "wrong" };
        println!("{mark:>7} [{}] {c}", v.reason);
        if !v.detail.is_empty() {
            println!("        {}", v.detail);
        }
    }
}
