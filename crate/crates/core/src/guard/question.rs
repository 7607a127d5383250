use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::policy::{sanitize, PolicyMode};
use crate::sql::{Column, Database, StatementClass, TableState, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GradingMode {
    Exact,
    Shadow,
}

/// Extra material shown next to a question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Guide {
    Image {
        url: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        caption: Option<String>,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        caption: Option<String>,
        table: TableState,
    },
}

/// On-disk form of a shadow fixture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowFixtureSpec {
    pub visible_name: String,
    pub columns: Vec<Column>,
    #[serde(default)]
    pub rows: Vec<Vec<Value>>,
}

/// Hidden grading data for a SELECT question. The data lives under its own
/// physical name and is bound under `visible_name` only inside a private
/// grading database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowFixture {
    pub visible_name: String,
    pub physical_name: String,
    pub table: TableState,
}

/// One line of `questions.ndjson`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSpec {
    pub id: u32,
    pub text: String,
    pub difficulty: u8,
    pub category: StatementClass,
    pub grading_mode: GradingMode,
    pub stored_answers: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadow_fixture: Option<ShadowFixtureSpec>,
    #[serde(default)]
    pub guides: Vec<Guide>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: u32,
    pub text: String,
    pub difficulty: u8,
    pub category: StatementClass,
    pub grading_mode: GradingMode,
    pub guides: Vec<Guide>,
    /// Accepted answer strings (EXACT) or reference queries (SHADOW).
    pub stored_answers: Vec<String>,
    pub shadow_fixture: Option<ShadowFixture>,
    /// Distinct canonical serialisations of the reference results (SHADOW).
    pub cached_reference_strings: Vec<String>,
    /// Whether reference results are compared in producer order.
    pub reference_ordered: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid question {id}: {reason}")]
pub struct InvalidQuestion {
    pub id: u32,
    pub reason: String,
}

pub const MAX_DIFFICULTY: u8 = 3;

impl Question {
    pub fn spec(&self) -> QuestionSpec {
        QuestionSpec {
            id: self.id,
            text: self.text.clone(),
            difficulty: self.difficulty,
            category: self.category,
            grading_mode: self.grading_mode,
            stored_answers: self.stored_answers.clone(),
            shadow_fixture: self.shadow_fixture.as_ref().map(|f| ShadowFixtureSpec {
                visible_name: f.visible_name.clone(),
                columns: f.table.columns.clone(),
                rows: f.table.rows.clone(),
            }),
            guides: self.guides.clone(),
        }
    }

    /// A fresh database holding only the shadow data, under the visible name.
    pub fn grading_database(&self) -> Option<Database> {
        let fixture = self.shadow_fixture.as_ref()?;
        let mut db = Database::new();
        db.bind(&fixture.visible_name, fixture.table.clone())
            .expect("fixture validated at ingest");
        Some(db)
    }
}

/// Validates a question and, for SHADOW questions, runs every reference
/// query on the fixture and caches the result string.
pub fn ingest_question(spec: QuestionSpec) -> Result<Question, InvalidQuestion> {
    let id = spec.id;
    let invalid = |reason: String| InvalidQuestion { id, reason };

    if spec.text.trim().is_empty() {
        return Err(invalid("question text is empty".into()));
    }
    if !(1..=MAX_DIFFICULTY).contains(&spec.difficulty) {
        return Err(invalid(format!(
            "difficulty {} is outside 1..={MAX_DIFFICULTY}",
            spec.difficulty
        )));
    }
    if spec.stored_answers.is_empty() {
        return Err(invalid("at least one stored answer is required".into()));
    }
    if spec.stored_answers.iter().any(|a| a.trim().is_empty()) {
        return Err(invalid("stored answers must not be blank".into()));
    }

    let mut question = Question {
        id,
        text: spec.text,
        difficulty: spec.difficulty,
        category: spec.category,
        grading_mode: spec.grading_mode,
        guides: spec.guides,
        stored_answers: spec.stored_answers,
        shadow_fixture: None,
        cached_reference_strings: Vec::new(),
        reference_ordered: false,
    };

    match spec.grading_mode {
        GradingMode::Exact => {
            if spec.shadow_fixture.is_some() {
                return Err(invalid(
                    "EXACT questions do not take a shadow fixture".into(),
                ));
            }
        }
        GradingMode::Shadow => {
            let fixture = spec
                .shadow_fixture
                .ok_or_else(|| invalid("SHADOW questions need a shadow fixture".into()))?;
            let physical_name = format!("shadow_q{id}_{}", fixture.visible_name.to_lowercase());
            let table = TableState::new(&physical_name, fixture.columns)
                .and_then(|t| t.with_rows(fixture.rows))
                .map_err(|e| invalid(format!("shadow fixture: {e}")))?;
            question.shadow_fixture = Some(ShadowFixture {
                visible_name: fixture.visible_name.to_lowercase(),
                physical_name,
                table,
            });

            let mut ordered = None;
            let mut strings = BTreeSet::new();
            for reference in &question.stored_answers {
                let stmt = sanitize(reference, PolicyMode::ShadowGrade, None)
                    .map_err(|r| invalid(format!("reference '{reference}': {r}")))?;
                let has_order = stmt.has_order_by();
                if *ordered.get_or_insert(has_order) != has_order {
                    return Err(invalid(
                        "references disagree on whether row order matters".into(),
                    ));
                }
                let mut db = question.grading_database().expect("fixture set above");
                let outcome = db
                    .execute(&stmt)
                    .map_err(|e| invalid(format!("reference '{reference}' failed: {e}")))?;
                let rs = outcome.rows().expect("SELECT yields rows");
                strings.insert(rs.serialize_as(has_order));
            }
            if strings.len() != 1 {
                return Err(invalid(format!(
                    "reference queries produce {} different results on the fixture",
                    strings.len()
                )));
            }
            question.reference_ordered = ordered.unwrap_or(false);
            question.cached_reference_strings = strings.into_iter().collect();
        }
    }
    Ok(question)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sql::ColumnType;

    fn fixture() -> ShadowFixtureSpec {
        ShadowFixtureSpec {
            visible_name: "tbl_students".into(),
            columns: vec![
                Column::new("id", ColumnType::Int, false),
                Column::new("first_name", ColumnType::Varchar(30), true),
                Column::new("last_name", ColumnType::Varchar(30), true),
            ],
            rows: vec![
                vec![
                    Value::Int(1),
                    Value::Text("Maria".into()),
                    Value::Text("Santos".into()),
                ],
                vec![
                    Value::Int(2),
                    Value::Text("Kenneth".into()),
                    Value::Text("Aguila".into()),
                ],
            ],
        }
    }

    fn shadow_spec(answers: &[&str]) -> QuestionSpec {
        QuestionSpec {
            id: 15,
            text: "display row for Kenneth Aguila".into(),
            difficulty: 1,
            category: StatementClass::Select,
            grading_mode: GradingMode::Shadow,
            stored_answers: answers.iter().map(|s| s.to_string()).collect(),
            shadow_fixture: Some(fixture()),
            guides: vec![],
        }
    }

    #[test]
    fn equivalent_references_cache_one_string() {
        let q = ingest_question(shadow_spec(&[
            "SELECT * FROM tbl_students WHERE last_name = 'Aguila'",
            "SELECT * FROM tbl_students WHERE first_name = 'Kenneth' AND last_name = 'Aguila'",
        ]))
        .unwrap();
        assert_eq!(q.cached_reference_strings.len(), 1);
        assert_eq!(
            q.cached_reference_strings[0],
            "id|first_name|last_name\n2|Kenneth|Aguila"
        );
        assert_eq!(
            q.shadow_fixture.unwrap().physical_name,
            "shadow_q15_tbl_students"
        );
    }

    #[test]
    fn disagreeing_references_are_rejected() {
        let err = ingest_question(shadow_spec(&[
            "SELECT * FROM tbl_students WHERE last_name = 'Aguila'",
            "SELECT * FROM tbl_students",
        ]))
        .unwrap_err();
        assert!(err.reason.contains("different results"));
    }

    #[test]
    fn non_select_reference_is_rejected() {
        assert!(ingest_question(shadow_spec(&["DELETE FROM tbl_students"])).is_err());
    }

    #[test]
    fn exact_with_no_answers_is_rejected() {
        let spec = QuestionSpec {
            id: 22,
            text: "delete tbl_jobs".into(),
            difficulty: 1,
            category: StatementClass::Drop,
            grading_mode: GradingMode::Exact,
            stored_answers: vec![],
            shadow_fixture: None,
            guides: vec![],
        };
        assert!(ingest_question(spec).is_err());
    }

    #[test]
    fn spec_round_trip_through_json() {
        let q = ingest_question(shadow_spec(&["SELECT * FROM tbl_students WHERE id = 2"])).unwrap();
        let line = serde_json::to_string(&q.spec()).unwrap();
        let back: QuestionSpec = serde_json::from_str(&line).unwrap();
        assert_eq!(ingest_question(back).unwrap(), q);
    }
}
