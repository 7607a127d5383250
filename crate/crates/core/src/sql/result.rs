use serde::{Deserialize, Serialize};

use super::value::Value;

/// Rows produced by SELECT or DESCRIBE. `ordered` records whether the
/// producing query fixed the row order (ORDER BY).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub ordered: bool,
}

impl ResultSet {
    /// Canonical string form: a `|`-joined header line followed by one line
    /// per row. Unordered results have their row lines sorted bytewise so
    /// that equal row multisets serialise identically.
    pub fn serialize(&self) -> String {
        self.serialize_as(self.ordered)
    }

    /// Like [`serialize`](Self::serialize) but with the ordering mode forced.
    pub fn serialize_as(&self, ordered: bool) -> String {
        let mut lines: Vec<String> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("|")
            })
            .collect();
        if !ordered {
            lines.sort_unstable_by(|a, b| a.as_bytes().cmp(b.as_bytes()));
        }
        let mut out = self.columns.join("|");
        for line in lines {
            out.push('\n');
            out.push_str(&line);
        }
        out
    }
}

pub fn serialize_result(rs: &ResultSet) -> String {
    rs.serialize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> ResultSet {
        ResultSet {
            columns: vec!["id".into(), "name".into()],
            rows: vec![
                vec![Value::Int(2), Value::Text("b".into())],
                vec![Value::Int(1), Value::Text("a".into())],
            ],
            ordered: false,
        }
    }

    #[test]
    fn header_only_when_empty() {
        let rs = ResultSet {
            columns: vec!["id".into(), "name".into()],
            rows: vec![],
            ordered: false,
        };
        assert_eq!(serialize_result(&rs), "id|name");
    }

    #[test]
    fn unordered_rows_are_sorted() {
        assert_eq!(serialize_result(&rows()), "id|name\n1|a\n2|b");
    }

    #[test]
    fn ordered_rows_keep_producer_order() {
        let mut rs = rows();
        rs.ordered = true;
        assert_eq!(serialize_result(&rs), "id|name\n2|b\n1|a");
    }

    #[test]
    fn nulls_render_literally() {
        let rs = ResultSet {
            columns: vec!["x".into()],
            rows: vec![vec![Value::Null]],
            ordered: true,
        };
        assert_eq!(rs.serialize(), "x\nNULL");
    }
}
