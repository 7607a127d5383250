use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sql::{parse, ParseError, Statement, StatementClass};

/// Which execution context a query is headed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PolicyMode {
    /// A student's own sandbox table.
    Practice,
    /// Blind-test grading of SELECT answers on a shadow table.
    ShadowGrade,
    /// String-compared answers; nothing is executed.
    ExactGrade,
}

impl PolicyMode {
    pub fn allows(self, class: StatementClass) -> bool {
        use StatementClass::*;
        match self {
            PolicyMode::Practice => matches!(
                class,
                Select | Insert | Update | Delete | Alter | Truncate | Describe
            ),
            PolicyMode::ShadowGrade => class == Select,
            PolicyMode::ExactGrade => true,
        }
    }

    pub fn allow_set(self) -> Vec<StatementClass> {
        StatementClass::ALL
            .into_iter()
            .filter(|c| self.allows(*c))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RejectReason {
    Parse,
    MultiStatement,
    ForbiddenClass,
    ForeignTable,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::Parse => "PARSE",
            RejectReason::MultiStatement => "MULTI_STATEMENT",
            RejectReason::ForbiddenClass => "FORBIDDEN_CLASS",
            RejectReason::ForeignTable => "FOREIGN_TABLE",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{reason}: {detail}")]
pub struct Rejection {
    pub reason: RejectReason,
    pub detail: String,
}

impl Rejection {
    fn new(reason: RejectReason, detail: impl Into<String>) -> Self {
        Self {
            reason,
            detail: detail.into(),
        }
    }
}

/// Parses `text` and checks it against the mode's policy. The decision is
/// made on the parsed statement, so identifiers such as `created_at` or a
/// literal `'DROP'` never trip it.
pub fn sanitize(
    text: &str,
    mode: PolicyMode,
    sandbox_table: Option<&str>,
) -> Result<Statement, Rejection> {
    let stmt = parse(text).map_err(|err| match err {
        ParseError::MultiStatement { .. } => {
            Rejection::new(RejectReason::MultiStatement, err.to_string())
        }
        other => Rejection::new(RejectReason::Parse, other.to_string()),
    })?;

    let class = stmt.class();
    if !mode.allows(class) {
        return Err(Rejection::new(
            RejectReason::ForbiddenClass,
            format!("{class} statements are not allowed here"),
        ));
    }

    if mode == PolicyMode::Practice {
        let Some(sandbox) = sandbox_table else {
            return Err(Rejection::new(
                RejectReason::ForeignTable,
                "no practice table is assigned",
            ));
        };
        // FROM-less SELECT touches no table at all.
        if let Some(target) = stmt.target_table() {
            if !target.eq_ignore_ascii_case(sandbox) {
                return Err(Rejection::new(
                    RejectReason::ForeignTable,
                    format!(
                        "only your own table '{}' may be used",
                        sandbox.to_lowercase()
                    ),
                ));
            }
        }
    }
    Ok(stmt)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SANDBOX: Option<&str> = Some("u1_table");

    fn reason(text: &str, mode: PolicyMode) -> Option<RejectReason> {
        sanitize(text, mode, SANDBOX).err().map(|r| r.reason)
    }

    #[test]
    fn drop_is_forbidden_in_practice() {
        assert_eq!(
            reason("DROP TABLE x", PolicyMode::Practice),
            Some(RejectReason::ForbiddenClass)
        );
        assert_eq!(
            reason("DROP TABLE u1_table", PolicyMode::Practice),
            Some(RejectReason::ForbiddenClass)
        );
    }

    #[test]
    fn truncate_own_table_is_allowed() {
        assert_eq!(
            reason("TRUNCATE TABLE u1_table", PolicyMode::Practice),
            None
        );
    }

    #[test]
    fn token_level_not_substring() {
        assert_eq!(
            reason("SELECT created_at FROM u1_table", PolicyMode::Practice),
            None
        );
        assert_eq!(
            reason(
                "SELECT * FROM u1_table WHERE name = 'DROP TABLE x'",
                PolicyMode::Practice
            ),
            None
        );
    }

    #[test]
    fn foreign_and_multi() {
        assert_eq!(
            reason("SELECT * FROM u2_table", PolicyMode::Practice),
            Some(RejectReason::ForeignTable)
        );
        assert_eq!(
            reason(
                "SELECT * FROM u1_table; DROP TABLE u1_table",
                PolicyMode::Practice
            ),
            Some(RejectReason::MultiStatement)
        );
        assert!(reason("SELECT * FROM u1_table", PolicyMode::Practice).is_none());
    }

    #[test]
    fn shadow_grade_is_select_only() {
        assert_eq!(
            reason("SELECT * FROM anything", PolicyMode::ShadowGrade),
            None
        );
        assert_eq!(
            reason("DELETE FROM t", PolicyMode::ShadowGrade),
            Some(RejectReason::ForbiddenClass)
        );
        assert_eq!(
            reason("DESCRIBE t", PolicyMode::ShadowGrade),
            Some(RejectReason::ForbiddenClass)
        );
    }

    #[test]
    fn allow_sets() {
        use StatementClass::*;
        assert_eq!(
            PolicyMode::Practice.allow_set(),
            vec![Alter, Truncate, Describe, Select, Insert, Update, Delete]
        );
        assert_eq!(PolicyMode::ShadowGrade.allow_set(), vec![Select]);
    }
}
