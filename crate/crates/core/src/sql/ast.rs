use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lexer::quote_ident;

/// The command family a statement belongs to. Policy decisions are made on
/// this value, never on raw text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StatementClass {
    Create,
    Drop,
    Alter,
    Truncate,
    Describe,
    Select,
    Insert,
    Update,
    Delete,
    DclOther,
}

impl StatementClass {
    pub const ALL: [StatementClass; 10] = [
        StatementClass::Create,
        StatementClass::Drop,
        StatementClass::Alter,
        StatementClass::Truncate,
        StatementClass::Describe,
        StatementClass::Select,
        StatementClass::Insert,
        StatementClass::Update,
        StatementClass::Delete,
        StatementClass::DclOther,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatementClass::Create => "CREATE",
            StatementClass::Drop => "DROP",
            StatementClass::Alter => "ALTER",
            StatementClass::Truncate => "TRUNCATE",
            StatementClass::Describe => "DESCRIBE",
            StatementClass::Select => "SELECT",
            StatementClass::Insert => "INSERT",
            StatementClass::Update => "UPDATE",
            StatementClass::Delete => "DELETE",
            StatementClass::DclOther => "DCL_OTHER",
        }
    }
}

impl fmt::Display for StatementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatementClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatementClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown statement class '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnType {
    Int,
    Varchar(u32),
    Date,
}

impl ColumnType {
    /// Lower-case rendering used by DESCRIBE.
    pub fn describe(&self) -> String {
        match self {
            ColumnType::Int => "int".to_string(),
            ColumnType::Varchar(n) => format!("varchar({n})"),
            ColumnType::Date => "date".to_string(),
        }
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnType::Int => f.write_str("INT"),
            ColumnType::Varchar(n) => write!(f, "VARCHAR({n})"),
            ColumnType::Date => f.write_str("DATE"),
        }
    }
}

impl FromStr for ColumnType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        match upper.as_str() {
            "INT" | "INTEGER" => Ok(ColumnType::Int),
            "DATE" => Ok(ColumnType::Date),
            _ => {
                let inner = upper
                    .strip_prefix("VARCHAR(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown column type '{s}'"))?;
                let n: u32 = inner
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad VARCHAR length in '{s}'"))?;
                if n == 0 {
                    return Err("VARCHAR length must be positive".to_string());
                }
                Ok(ColumnType::Varchar(n))
            }
        }
    }
}

// Serialised as its SQL spelling ("INT", "VARCHAR(50)", "DATE").
impl Serialize for ColumnType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ColumnType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnDef {
    pub name: String,
    pub ty: ColumnType,
    pub nullable: bool,
}

impl fmt::Display for ColumnDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", quote_ident(&self.name), self.ty)?;
        if !self.nullable {
            f.write_str(" NOT NULL")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Null,
    Int(i64),
    Str(String),
}

impl Literal {
    /// Column header used when a literal appears in a select list.
    pub fn header(&self) -> String {
        match self {
            Literal::Null => "NULL".to_string(),
            Literal::Int(v) => v.to_string(),
            Literal::Str(s) => s.clone(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Null => f.write_str("NULL"),
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Str(s) => write!(f, "'{}'", s.replace('\\', "\\\\").replace('\'', "''")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Column(String),
    Literal(Literal),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Column(c) => f.write_str(&quote_ident(c)),
            Operand::Literal(l) => l.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::NotEq => "<>",
            CmpOp::Lt => "<",
            CmpOp::LtEq => "<=",
            CmpOp::Gt => ">",
            CmpOp::GtEq => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Compare {
        left: Operand,
        op: CmpOp,
        right: Operand,
    },
    Like {
        operand: Operand,
        pattern: Operand,
        negated: bool,
    },
    IsNull {
        operand: Operand,
        negated: bool,
    },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn and(left: Expr, right: Expr) -> Expr {
        Expr::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Expr, right: Expr) -> Expr {
        Expr::Or(Box::new(left), Box::new(right))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Expr) -> Expr {
        Expr::Not(Box::new(inner))
    }
}

// Parenthesisation mirrors the parser's precedence (OR < AND < NOT) and
// left associativity, so rendering reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Compare { left, op, right } => write!(f, "{left} {} {right}", op.as_str()),
            Expr::Like {
                operand,
                pattern,
                negated,
            } => {
                let not = if *negated { "NOT " } else { "" };
                write!(f, "{operand} {not}LIKE {pattern}")
            }
            Expr::IsNull { operand, negated } => {
                let not = if *negated { "NOT " } else { "" };
                write!(f, "{operand} IS {not}NULL")
            }
            Expr::Not(inner) => match inner.as_ref() {
                Expr::And(..) | Expr::Or(..) => write!(f, "NOT ({inner})"),
                _ => write!(f, "NOT {inner}"),
            },
            Expr::And(l, r) => {
                match l.as_ref() {
                    Expr::Or(..) => write!(f, "({l})")?,
                    _ => write!(f, "{l}")?,
                }
                f.write_str(" AND ")?;
                match r.as_ref() {
                    Expr::Or(..) | Expr::And(..) => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
            Expr::Or(l, r) => {
                write!(f, "{l} OR ")?;
                match r.as_ref() {
                    Expr::Or(..) => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectItem {
    Wildcard,
    Operand {
        operand: Operand,
        alias: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderItem {
    pub column: String,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Select {
    pub distinct: bool,
    pub items: Vec<SelectItem>,
    pub from: Option<String>,
    pub selection: Option<Expr>,
    pub order_by: Vec<OrderItem>,
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlterAction {
    AddColumn(ColumnDef),
    DropColumn(String),
    ModifyColumn(ColumnDef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DclVerb {
    Grant,
    Revoke,
}

/// One parsed command of the supported subset. Identifiers are stored
/// lower-cased; string literals keep their case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    CreateTable {
        table: String,
        columns: Vec<ColumnDef>,
    },
    DropTable {
        table: String,
    },
    AlterTable {
        table: String,
        action: AlterAction,
    },
    Truncate {
        table: String,
    },
    Describe {
        table: String,
    },
    Insert {
        table: String,
        columns: Option<Vec<String>>,
        rows: Vec<Vec<Literal>>,
    },
    Select(Select),
    Update {
        table: String,
        assignments: Vec<(String, Literal)>,
        selection: Option<Expr>,
    },
    Delete {
        table: String,
        selection: Option<Expr>,
    },
    /// GRANT / REVOKE, kept only as normalised tokens so they can be classified.
    Dcl {
        verb: DclVerb,
        body: Vec<String>,
    },
}

impl Statement {
    pub fn class(&self) -> StatementClass {
        match self {
            Statement::CreateTable { .. } => StatementClass::Create,
            Statement::DropTable { .. } => StatementClass::Drop,
            Statement::AlterTable { .. } => StatementClass::Alter,
            Statement::Truncate { .. } => StatementClass::Truncate,
            Statement::Describe { .. } => StatementClass::Describe,
            Statement::Insert { .. } => StatementClass::Insert,
            Statement::Select(_) => StatementClass::Select,
            Statement::Update { .. } => StatementClass::Update,
            Statement::Delete { .. } => StatementClass::Delete,
            Statement::Dcl { .. } => StatementClass::DclOther,
        }
    }

    /// The table the statement reads or writes; `None` for FROM-less SELECT
    /// and for DCL without an `ON` clause.
    pub fn target_table(&self) -> Option<&str> {
        match self {
            Statement::CreateTable { table, .. }
            | Statement::DropTable { table }
            | Statement::AlterTable { table, .. }
            | Statement::Truncate { table }
            | Statement::Describe { table }
            | Statement::Insert { table, .. }
            | Statement::Update { table, .. }
            | Statement::Delete { table, .. } => Some(table),
            Statement::Select(select) => select.from.as_deref(),
            Statement::Dcl { body, .. } => body
                .iter()
                .position(|t| t == "on")
                .and_then(|i| body.get(i + 1))
                .map(String::as_str),
        }
    }

    pub fn has_order_by(&self) -> bool {
        matches!(self, Statement::Select(s) if !s.order_by.is_empty())
    }
}

/// Convenience wrapper over [`Statement::class`].
pub fn classify(stmt: &Statement) -> StatementClass {
    stmt.class()
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::CreateTable { table, columns } => {
                write!(f, "CREATE TABLE {} ({})", quote_ident(table), join(columns))
            }
            Statement::DropTable { table } => write!(f, "DROP TABLE {}", quote_ident(table)),
            Statement::AlterTable { table, action } => {
                write!(f, "ALTER TABLE {} ", quote_ident(table))?;
                match action {
                    AlterAction::AddColumn(def) => write!(f, "ADD COLUMN {def}"),
                    AlterAction::DropColumn(name) => write!(f, "DROP COLUMN {}", quote_ident(name)),
                    AlterAction::ModifyColumn(def) => write!(f, "MODIFY COLUMN {def}"),
                }
            }
            Statement::Truncate { table } => write!(f, "TRUNCATE TABLE {}", quote_ident(table)),
            Statement::Describe { table } => write!(f, "DESCRIBE {}", quote_ident(table)),
            Statement::Insert {
                table,
                columns,
                rows,
            } => {
                write!(f, "INSERT INTO {}", quote_ident(table))?;
                if let Some(cols) = columns {
                    let cols: Vec<String> = cols.iter().map(|c| quote_ident(c)).collect();
                    write!(f, " ({})", cols.join(", "))?;
                }
                f.write_str(" VALUES ")?;
                let tuples: Vec<String> = rows.iter().map(|r| format!("({})", join(r))).collect();
                f.write_str(&tuples.join(", "))
            }
            Statement::Select(select) => {
                f.write_str("SELECT ")?;
                if select.distinct {
                    f.write_str("DISTINCT ")?;
                }
                let items: Vec<String> = select
                    .items
                    .iter()
                    .map(|item| match item {
                        SelectItem::Wildcard => "*".to_string(),
                        SelectItem::Operand {
                            operand,
                            alias: Some(alias),
                        } => format!("{operand} AS {}", quote_ident(alias)),
                        SelectItem::Operand {
                            operand,
                            alias: None,
                        } => operand.to_string(),
                    })
                    .collect();
                f.write_str(&items.join(", "))?;
                if let Some(from) = &select.from {
                    write!(f, " FROM {}", quote_ident(from))?;
                }
                if let Some(expr) = &select.selection {
                    write!(f, " WHERE {expr}")?;
                }
                if !select.order_by.is_empty() {
                    let keys: Vec<String> = select
                        .order_by
                        .iter()
                        .map(|o| {
                            if o.descending {
                                format!("{} DESC", quote_ident(&o.column))
                            } else {
                                quote_ident(&o.column)
                            }
                        })
                        .collect();
                    write!(f, " ORDER BY {}", keys.join(", "))?;
                }
                if let Some(limit) = select.limit {
                    write!(f, " LIMIT {limit}")?;
                }
                Ok(())
            }
            Statement::Update {
                table,
                assignments,
                selection,
            } => {
                let sets: Vec<String> = assignments
                    .iter()
                    .map(|(c, v)| format!("{} = {v}", quote_ident(c)))
                    .collect();
                write!(f, "UPDATE {} SET {}", quote_ident(table), sets.join(", "))?;
                if let Some(expr) = selection {
                    write!(f, " WHERE {expr}")?;
                }
                Ok(())
            }
            Statement::Delete { table, selection } => {
                write!(f, "DELETE FROM {}", quote_ident(table))?;
                if let Some(expr) = selection {
                    write!(f, " WHERE {expr}")?;
                }
                Ok(())
            }
            Statement::Dcl { verb, body } => {
                let verb = match verb {
                    DclVerb::Grant => "GRANT",
                    DclVerb::Revoke => "REVOKE",
                };
                if body.is_empty() {
                    f.write_str(verb)
                } else {
                    write!(f, "{verb} {}", body.join(" "))
                }
            }
        }
    }
}
