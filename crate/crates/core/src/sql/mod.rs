//! A small in-memory SQL engine covering the subset students practise:
//! table DDL, single-table DML, and SELECT with WHERE / ORDER BY / LIMIT.
//!
//! The grammar is documented in `docs/grammar.ebnf`. Joins, aggregates,
//! grouping and subqueries are rejected with [`ParseError::Unsupported`].

mod ast;
mod engine;
mod error;
mod lexer;
mod parser;
mod result;
mod value;

pub use ast::{
    classify, AlterAction, CmpOp, ColumnDef, ColumnType, DclVerb, Expr, Literal, Operand,
    OrderItem, Select, SelectItem, Statement, StatementClass,
};
pub use engine::{
    Column, Database, ExecOutcome, Limits, TableState, DEFAULT_BUDGET, DEFAULT_MAX_ROWS,
};
pub use error::{ExecError, ParseError};
pub use lexer::quote_ident;
pub use parser::parse;
pub use result::{serialize_result, ResultSet};
pub use value::{is_valid_date, like_match, Value};

/// Either half of running raw text: it failed to parse, or failed to run.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SqlError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

impl Database {
    /// Parses and executes `sql` in one step. No policy is applied; callers
    /// handling untrusted input go through [`crate::guard::sanitize`].
    pub fn run(&mut self, sql: &str) -> Result<ExecOutcome, SqlError> {
        let stmt = parse(sql)?;
        Ok(self.execute(&stmt)?)
    }
}
