use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::guard::{sanitize, PolicyMode, Rejection};
use crate::sql::{Column, ColumnType, Database, ExecError, ExecOutcome, TableState, Value};

/// The practice table name for a player: `<lowercase username>_table`.
pub fn sandbox_name(username: &str) -> String {
    format!("{}_table", username.to_lowercase())
}

/// A fresh practice table with the default schema and three seed rows.
pub fn provision_sandbox(username: &str) -> TableState {
    let columns = vec![
        Column::new("id", ColumnType::Int, true),
        Column::new("name", ColumnType::Varchar(50), true),
        Column::new("created", ColumnType::Date, true),
    ];
    let rows = [
        (1, "Alice", "2024-01-15"),
        (2, "Bob", "2024-02-20"),
        (3, "Carol", "2024-03-25"),
    ]
    .into_iter()
    .map(|(id, name, date)| {
        vec![
            Value::Int(id),
            Value::Text(name.to_string()),
            Value::Text(date.to_string()),
        ]
    })
    .collect();
    TableState::new(&sandbox_name(username), columns)
        .and_then(|t| t.with_rows(rows))
        .expect("default sandbox schema is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PracticeError {
    #[error("rejected: {0}")]
    Rejected(#[from] Rejection),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// One player's practice table. Every query goes through the PRACTICE
/// policy, which only admits statements aimed at this table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sandbox {
    pub owner: String,
    pub table: TableState,
}

impl Sandbox {
    pub fn provision(owner: &str) -> Self {
        Self {
            owner: owner.to_string(),
            table: provision_sandbox(owner),
        }
    }

    pub fn name(&self) -> String {
        sandbox_name(&self.owner)
    }

    /// Restores the default schema and rows.
    pub fn reset(&mut self) {
        self.table = provision_sandbox(&self.owner);
    }

    pub fn run(&mut self, text: &str) -> Result<ExecOutcome, PracticeError> {
        let name = self.name();
        let stmt = sanitize(text, PolicyMode::Practice, Some(&name))?;
        let mut db = Database::new();
        db.bind(&name, self.table.clone())?;
        let outcome = db.execute(&stmt)?;
        self.table = db.into_table(&name).expect("policy forbids DROP");
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guard::RejectReason;

    #[test]
    fn named_after_user() {
        assert_eq!(provision_sandbox("201910001").name, "201910001_table");
        assert_eq!(provision_sandbox("KAguila").name, "kaguila_table");
    }

    #[test]
    fn reset_restores_schema() {
        let mut sb = Sandbox::provision("u1");
        sb.run("ALTER TABLE u1_table ADD score INT").unwrap();
        sb.run("TRUNCATE TABLE u1_table").unwrap();
        assert_eq!(sb.table.columns.len(), 4);
        sb.reset();
        assert_eq!(sb.table, provision_sandbox("u1"));
    }

    #[test]
    fn delete_on_own_table() {
        let mut sb = Sandbox::provision("u1");
        let out = sb.run("DELETE FROM u1_table WHERE id = 2").unwrap();
        assert_eq!(out.affected(), Some(1));
        assert_eq!(sb.table.rows.len(), 2);
    }

    #[test]
    fn policy_applies() {
        let mut sb = Sandbox::provision("u1");
        let reason = |sb: &mut Sandbox, q: &str| match sb.run(q) {
            Err(PracticeError::Rejected(r)) => Some(r.reason),
            _ => None,
        };
        assert_eq!(
            reason(&mut sb, "DROP TABLE u1_table"),
            Some(RejectReason::ForbiddenClass)
        );
        assert_eq!(
            reason(&mut sb, "SELECT * FROM u2_table"),
            Some(RejectReason::ForeignTable)
        );
        assert_eq!(sb.table.rows.len(), 3);
    }

    #[test]
    fn failed_statement_leaves_table() {
        let mut sb = Sandbox::provision("u1");
        assert!(matches!(
            sb.run("INSERT INTO u1_table VALUES (4, 'D', 'not a date')"),
            Err(PracticeError::Exec(_))
        ));
        assert_eq!(sb.table, provision_sandbox("u1"));
    }
}
