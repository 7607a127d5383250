use std::cmp::Ordering;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::ast::{ColumnType, Literal};
use super::error::ExecError;

/// A stored cell. DATE cells are kept as validated `YYYY-MM-DD` text, which
/// orders chronologically under byte comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Null,
    Int(i64),
    Text(String),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Ordering used by ORDER BY: NULL sorts first, then by value.
    pub fn sort_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Null, Value::Null) => Ordering::Equal,
            (Value::Null, _) => Ordering::Less,
            (_, Value::Null) => Ordering::Greater,
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Text(a), Value::Text(b)) => a.as_bytes().cmp(b.as_bytes()),
            (Value::Int(_), Value::Text(_)) => Ordering::Less,
            (Value::Text(_), Value::Int(_)) => Ordering::Greater,
        }
    }

    pub fn conforms_to(&self, ty: ColumnType, nullable: bool) -> bool {
        match (self, ty) {
            (Value::Null, _) => nullable,
            (Value::Int(_), ColumnType::Int) => true,
            (Value::Text(s), ColumnType::Varchar(n)) => s.chars().count() <= n as usize,
            (Value::Text(s), ColumnType::Date) => is_valid_date(s),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<&Literal> for Value {
    fn from(lit: &Literal) -> Self {
        match lit {
            Literal::Null => Value::Null,
            Literal::Int(v) => Value::Int(*v),
            Literal::Str(s) => Value::Text(s.clone()),
        }
    }
}

pub fn is_valid_date(s: &str) -> bool {
    s.len() == 10 && NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
}

/// Converts a literal into a cell for a column, enforcing type, length and
/// nullability.
pub fn coerce_literal(
    lit: &Literal,
    column: &str,
    ty: ColumnType,
    nullable: bool,
) -> Result<Value, ExecError> {
    let value = Value::from(lit);
    coerce_value(value, column, ty, nullable)
}

pub fn coerce_value(
    value: Value,
    column: &str,
    ty: ColumnType,
    nullable: bool,
) -> Result<Value, ExecError> {
    if value.conforms_to(ty, nullable) {
        return Ok(value);
    }
    let why = match (&value, ty) {
        (Value::Null, _) => format!("column '{column}' cannot be NULL"),
        (Value::Text(s), ColumnType::Varchar(n)) => {
            format!(
                "value of length {} exceeds VARCHAR({n}) for column '{column}'",
                s.chars().count()
            )
        }
        (Value::Text(s), ColumnType::Date) => {
            format!("'{s}' is not a valid YYYY-MM-DD date for column '{column}'")
        }
        (v, ty) => format!("{v} does not fit column '{column}' of type {ty}"),
    };
    Err(ExecError::TypeMismatch(why))
}

/// Converts an existing cell when a column's type is modified.
pub fn convert_for_modify(
    value: &Value,
    column: &str,
    ty: ColumnType,
    nullable: bool,
) -> Result<Value, ExecError> {
    let converted = match (value, ty) {
        (Value::Int(v), ColumnType::Varchar(_)) => Value::Text(v.to_string()),
        (Value::Text(s), ColumnType::Int) => match s.trim().parse::<i64>() {
            Ok(v) => Value::Int(v),
            Err(_) => {
                return Err(ExecError::TypeMismatch(format!(
                    "'{s}' in column '{column}' cannot become INT"
                )))
            }
        },
        (v, _) => v.clone(),
    };
    coerce_value(converted, column, ty, nullable)
}

/// SQL LIKE with `%` (any run) and `_` (one char), case-sensitive.
pub fn like_match(text: &str, pattern: &str) -> bool {
    let t: Vec<char> = text.chars().collect();
    let p: Vec<char> = pattern.chars().collect();
    // dp[j]: pattern[..i] matches text[..j]
    let mut dp = vec![false; t.len() + 1];
    dp[0] = true;
    for &pc in &p {
        let mut next = vec![false; t.len() + 1];
        match pc {
            '%' => {
                let mut seen = false;
                for j in 0..=t.len() {
                    seen |= dp[j];
                    next[j] = seen;
                }
            }
            _ => {
                for j in 1..=t.len() {
                    next[j] = dp[j - 1] && (pc == '_' || pc == t[j - 1]);
                }
            }
        }
        dp = next;
    }
    dp[t.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_patterns() {
        assert!(like_match("Aguila", "Ag%"));
        assert!(like_match("Aguila", "%ui%"));
        assert!(like_match("Aguila", "A_uila"));
        assert!(!like_match("Aguila", "ag%"));
        assert!(like_match("", "%"));
        assert!(!like_match("", "_"));
        assert!(like_match("a%b", "a%b"));
    }

    #[test]
    fn date_validation() {
        assert!(is_valid_date("2024-02-29"));
        assert!(!is_valid_date("2023-02-29"));
        assert!(!is_valid_date("2024-2-9"));
        assert!(!is_valid_date("yesterday"));
    }

    #[test]
    fn nulls_sort_first() {
        let mut vals = vec![Value::Int(2), Value::Null, Value::Int(1)];
        vals.sort_by(Value::sort_cmp);
        assert_eq!(vals, vec![Value::Null, Value::Int(1), Value::Int(2)]);
    }
}
