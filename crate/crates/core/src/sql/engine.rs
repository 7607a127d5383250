use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::error::ExecError;
use super::result::ResultSet;
use super::value::{coerce_literal, convert_for_modify, is_valid_date, like_match, Value};

pub const DEFAULT_MAX_ROWS: usize = 5000;
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_rows: usize,
    pub budget: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_rows: DEFAULT_MAX_ROWS,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
    #[serde(default = "default_nullable")]
    pub nullable: bool,
}

fn default_nullable() -> bool {
    true
}

impl Column {
    pub fn new(name: &str, ty: ColumnType, nullable: bool) -> Self {
        Self {
            name: name.to_lowercase(),
            ty,
            nullable,
        }
    }
}

impl From<&ColumnDef> for Column {
    fn from(def: &ColumnDef) -> Self {
        Column::new(&def.name, def.ty, def.nullable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableState {
    pub name: String,
    pub columns: Vec<Column>,
    #[serde(default)]
    pub rows: Vec<Vec<Value>>,
}

impl TableState {
    pub fn new(name: &str, columns: Vec<Column>) -> Result<Self, ExecError> {
        let table = Self {
            name: name.to_lowercase(),
            columns,
            rows: Vec::new(),
        };
        table.check_columns()?;
        Ok(table)
    }

    pub fn with_rows(mut self, rows: Vec<Vec<Value>>) -> Result<Self, ExecError> {
        self.rows = rows;
        self.validate()?;
        Ok(self)
    }

    fn check_columns(&self) -> Result<(), ExecError> {
        if self.columns.is_empty() {
            return Err(ExecError::InvalidSchema(format!(
                "table '{}' has no columns",
                self.name
            )));
        }
        let mut seen = HashSet::new();
        for col in &self.columns {
            if !seen.insert(col.name.to_lowercase()) {
                return Err(ExecError::DuplicateColumn(col.name.clone()));
            }
        }
        Ok(())
    }

    /// Checks column uniqueness, row arity and cell conformance.
    pub fn validate(&self) -> Result<(), ExecError> {
        self.check_columns()?;
        for row in &self.rows {
            if row.len() != self.columns.len() {
                return Err(ExecError::ArityMismatch {
                    expected: self.columns.len(),
                    found: row.len(),
                });
            }
            for (value, col) in row.iter().zip(&self.columns) {
                if !value.conforms_to(col.ty, col.nullable) {
                    super::value::coerce_value(value.clone(), &col.name, col.ty, col.nullable)?;
                }
            }
        }
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Result<usize, ExecError> {
        let lower = name.to_lowercase();
        self.columns
            .iter()
            .position(|c| c.name == lower)
            .ok_or_else(|| ExecError::UnknownColumn {
                table: self.name.clone(),
                column: lower,
            })
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecOutcome {
    Rows(ResultSet),
    Affected(u64),
}

impl ExecOutcome {
    pub fn rows(&self) -> Option<&ResultSet> {
        match self {
            ExecOutcome::Rows(rs) => Some(rs),
            ExecOutcome::Affected(_) => None,
        }
    }

    pub fn affected(&self) -> Option<u64> {
        match self {
            ExecOutcome::Affected(n) => Some(*n),
            ExecOutcome::Rows(_) => None,
        }
    }
}

struct Budget {
    deadline: Instant,
    ticks: u32,
}

impl Budget {
    fn new(limit: Duration) -> Self {
        Self {
            deadline: Instant::now() + limit,
            ticks: 0,
        }
    }

    fn tick(&mut self) -> Result<(), ExecError> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(64) && Instant::now() > self.deadline {
            return Err(ExecError::ResourceLimit(
                "statement exceeded its evaluation time budget".to_string(),
            ));
        }
        Ok(())
    }
}

/// A set of named tables. Every statement either fully applies or leaves the
/// database untouched.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Database {
    tables: BTreeMap<String, TableState>,
    #[serde(skip)]
    limits: Limits,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_limits(limits: Limits) -> Self {
        Self {
            tables: BTreeMap::new(),
            limits,
        }
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn table(&self, name: &str) -> Option<&TableState> {
        self.tables.get(&name.to_lowercase())
    }

    pub fn tables(&self) -> impl Iterator<Item = &TableState> {
        self.tables.values()
    }

    pub fn into_table(mut self, name: &str) -> Option<TableState> {
        self.tables.remove(&name.to_lowercase())
    }

    /// Installs `table` under `name`, replacing anything already bound there.
    pub fn bind(&mut self, name: &str, mut table: TableState) -> Result<(), ExecError> {
        table.validate()?;
        if table.rows.len() > self.limits.max_rows {
            return Err(self.row_cap_error());
        }
        table.name = name.to_lowercase();
        self.tables.insert(table.name.clone(), table);
        Ok(())
    }

    fn row_cap_error(&self) -> ExecError {
        ExecError::ResourceLimit(format!(
            "tables are capped at {} rows",
            self.limits.max_rows
        ))
    }

    fn lookup(&self, name: &str) -> Result<&TableState, ExecError> {
        self.tables
            .get(name)
            .ok_or_else(|| ExecError::UnknownTable(name.to_string()))
    }

    pub fn execute(&mut self, stmt: &Statement) -> Result<ExecOutcome, ExecError> {
        let mut budget = Budget::new(self.limits.budget);
        match stmt {
            Statement::Select(select) => self.select(select, &mut budget).map(ExecOutcome::Rows),
            Statement::Describe { table } => {
                let t = self.lookup(table)?;
                let rows = t
                    .columns
                    .iter()
                    .map(|c| {
                        vec![
                            Value::Text(c.name.clone()),
                            Value::Text(c.ty.describe()),
                            Value::Text(if c.nullable { "YES" } else { "NO" }.to_string()),
                        ]
                    })
                    .collect();
                Ok(ExecOutcome::Rows(ResultSet {
                    columns: vec!["Field".into(), "Type".into(), "Null".into()],
                    rows,
                    ordered: true,
                }))
            }
            Statement::CreateTable { table, columns } => {
                if self.tables.contains_key(table) {
                    return Err(ExecError::DuplicateTable(table.clone()));
                }
                let state = TableState::new(table, columns.iter().map(Column::from).collect())?;
                self.tables.insert(table.clone(), state);
                Ok(ExecOutcome::Affected(0))
            }
            Statement::DropTable { table } => {
                self.tables
                    .remove(table)
                    .ok_or_else(|| ExecError::UnknownTable(table.clone()))?;
                Ok(ExecOutcome::Affected(0))
            }
            Statement::Truncate { table } => {
                let t = self
                    .tables
                    .get_mut(table)
                    .ok_or_else(|| ExecError::UnknownTable(table.clone()))?;
                t.rows.clear();
                Ok(ExecOutcome::Affected(0))
            }
            Statement::AlterTable { table, action } => {
                let altered = alter(self.lookup(table)?, action, &mut budget)?;
                self.tables.insert(table.clone(), altered);
                Ok(ExecOutcome::Affected(0))
            }
            Statement::Insert {
                table,
                columns,
                rows,
            } => {
                let t = self.lookup(table)?;
                let new_rows = build_insert_rows(t, columns.as_deref(), rows)?;
                if t.rows.len() + new_rows.len() > self.limits.max_rows {
                    return Err(self.row_cap_error());
                }
                let count = new_rows.len() as u64;
                self.tables
                    .get_mut(table)
                    .expect("looked up above")
                    .rows
                    .extend(new_rows);
                Ok(ExecOutcome::Affected(count))
            }
            Statement::Update {
                table,
                assignments,
                selection,
            } => {
                let t = self.lookup(table)?;
                let mut targets = Vec::with_capacity(assignments.len());
                for (col, lit) in assignments {
                    let idx = t.column_index(col)?;
                    let c = &t.columns[idx];
                    targets.push((idx, coerce_literal(lit, &c.name, c.ty, c.nullable)?));
                }
                let pred = selection.as_ref().map(|e| bind_expr(t, e)).transpose()?;
                let mut rows = t.rows.clone();
                let mut count = 0;
                for row in rows.iter_mut() {
                    budget.tick()?;
                    if pred.as_ref().is_none_or(|p| p.eval(row) == Some(true)) {
                        for (idx, value) in &targets {
                            row[*idx] = value.clone();
                        }
                        count += 1;
                    }
                }
                self.tables.get_mut(table).expect("looked up above").rows = rows;
                Ok(ExecOutcome::Affected(count))
            }
            Statement::Delete { table, selection } => {
                let t = self.lookup(table)?;
                let pred = selection.as_ref().map(|e| bind_expr(t, e)).transpose()?;
                let mut kept = Vec::with_capacity(t.rows.len());
                for row in &t.rows {
                    budget.tick()?;
                    if !pred.as_ref().is_none_or(|p| p.eval(row) == Some(true)) {
                        kept.push(row.clone());
                    }
                }
                let removed = (t.rows.len() - kept.len()) as u64;
                self.tables.get_mut(table).expect("looked up above").rows = kept;
                Ok(ExecOutcome::Affected(removed))
            }
            Statement::Dcl { .. } => Err(ExecError::Unsupported("GRANT/REVOKE".to_string())),
        }
    }

    fn select(&self, select: &Select, budget: &mut Budget) -> Result<ResultSet, ExecError> {
        let empty;
        let (table, source): (Option<&TableState>, &[Vec<Value>]) = match &select.from {
            Some(name) => {
                let t = self.lookup(name)?;
                (Some(t), &t.rows)
            }
            None => {
                empty = vec![Vec::new()];
                (None, &empty)
            }
        };

        let pred = match (&select.selection, table) {
            (Some(expr), Some(t)) => Some(bind_expr(t, expr)?),
            _ => None,
        };

        // Projection plan
        let mut columns = Vec::new();
        let mut plan: Vec<Bound> = Vec::new();
        for item in &select.items {
            match item {
                SelectItem::Wildcard => {
                    let t = table.expect("parser requires FROM for *");
                    for (i, c) in t.columns.iter().enumerate() {
                        columns.push(c.name.clone());
                        plan.push(Bound::Col(i));
                    }
                }
                SelectItem::Operand { operand, alias } => {
                    let (bound, header) = match operand {
                        Operand::Column(name) => {
                            let t = table.ok_or_else(|| ExecError::UnknownColumn {
                                table: String::new(),
                                column: name.clone(),
                            })?;
                            (Bound::Col(t.column_index(name)?), name.clone())
                        }
                        Operand::Literal(lit) => (Bound::Lit(Value::from(lit)), lit.header()),
                    };
                    columns.push(alias.clone().unwrap_or(header));
                    plan.push(bound);
                }
            }
        }

        let mut order_keys = Vec::new();
        if let Some(t) = table {
            for item in &select.order_by {
                order_keys.push((t.column_index(&item.column)?, item.descending));
            }
        }

        let mut matched: Vec<&Vec<Value>> = Vec::new();
        for row in source {
            budget.tick()?;
            if pred.as_ref().is_none_or(|p| p.eval(row) == Some(true)) {
                matched.push(row);
            }
        }

        if !order_keys.is_empty() {
            matched.sort_by(|a, b| {
                for &(idx, desc) in &order_keys {
                    let ord = a[idx].sort_cmp(&b[idx]);
                    let ord = if desc { ord.reverse() } else { ord };
                    if ord.is_ne() {
                        return ord;
                    }
                }
                std::cmp::Ordering::Equal
            });
        }

        let mut rows: Vec<Vec<Value>> = Vec::with_capacity(matched.len());
        let mut seen = HashSet::new();
        for row in matched {
            budget.tick()?;
            let projected: Vec<Value> = plan.iter().map(|b| b.value(row).clone()).collect();
            if select.distinct && !seen.insert(projected.clone()) {
                continue;
            }
            rows.push(projected);
        }
        if let Some(limit) = select.limit {
            rows.truncate(limit.min(usize::MAX as u64) as usize);
        }

        Ok(ResultSet {
            columns,
            rows,
            ordered: !select.order_by.is_empty(),
        })
    }
}

fn build_insert_rows(
    table: &TableState,
    columns: Option<&[String]>,
    tuples: &[Vec<Literal>],
) -> Result<Vec<Vec<Value>>, ExecError> {
    let targets: Vec<usize> = match columns {
        Some(names) => {
            let mut seen = HashSet::new();
            let mut idxs = Vec::with_capacity(names.len());
            for name in names {
                let idx = table.column_index(name)?;
                if !seen.insert(idx) {
                    return Err(ExecError::DuplicateColumn(name.clone()));
                }
                idxs.push(idx);
            }
            idxs
        }
        None => (0..table.columns.len()).collect(),
    };

    let mut out = Vec::with_capacity(tuples.len());
    for tuple in tuples {
        if tuple.len() != targets.len() {
            return Err(ExecError::ArityMismatch {
                expected: targets.len(),
                found: tuple.len(),
            });
        }
        let mut row = vec![Value::Null; table.columns.len()];
        for (lit, &idx) in tuple.iter().zip(&targets) {
            let col = &table.columns[idx];
            row[idx] = coerce_literal(lit, &col.name, col.ty, col.nullable)?;
        }
        for (idx, col) in table.columns.iter().enumerate() {
            if row[idx].is_null() && !col.nullable {
                return Err(ExecError::TypeMismatch(format!(
                    "column '{}' cannot be NULL",
                    col.name
                )));
            }
        }
        out.push(row);
    }
    Ok(out)
}

fn alter(
    table: &TableState,
    action: &AlterAction,
    budget: &mut Budget,
) -> Result<TableState, ExecError> {
    let mut next = table.clone();
    match action {
        AlterAction::AddColumn(def) => {
            if table.column_index(&def.name).is_ok() {
                return Err(ExecError::DuplicateColumn(def.name.clone()));
            }
            if !def.nullable && !table.rows.is_empty() {
                return Err(ExecError::TypeMismatch(format!(
                    "cannot add NOT NULL column '{}' to a table with rows",
                    def.name
                )));
            }
            next.columns.push(Column::from(def));
            for row in next.rows.iter_mut() {
                row.push(Value::Null);
            }
        }
        AlterAction::DropColumn(name) => {
            let idx = table.column_index(name)?;
            if table.columns.len() == 1 {
                return Err(ExecError::InvalidSchema(
                    "cannot drop the only column of a table".to_string(),
                ));
            }
            next.columns.remove(idx);
            for row in next.rows.iter_mut() {
                row.remove(idx);
            }
        }
        AlterAction::ModifyColumn(def) => {
            let idx = table.column_index(&def.name)?;
            next.columns[idx] = Column::from(def);
            for row in next.rows.iter_mut() {
                budget.tick()?;
                row[idx] = convert_for_modify(&row[idx], &def.name, def.ty, def.nullable)?;
            }
        }
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Int,
    Text,
    Date,
    Null,
    StrLit,
}

#[derive(Debug, Clone)]
enum Bound {
    Col(usize),
    Lit(Value),
}

impl Bound {
    fn value<'a>(&'a self, row: &'a [Value]) -> &'a Value {
        match self {
            Bound::Col(i) => &row[*i],
            Bound::Lit(v) => v,
        }
    }
}

/// A WHERE tree with columns resolved to indexes and types checked.
#[derive(Debug, Clone)]
enum Pred {
    Cmp(Bound, CmpOp, Bound),
    Like(Bound, Bound, bool),
    IsNull(Bound, bool),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

fn bind_operand(table: &TableState, op: &Operand) -> Result<(Bound, Kind), ExecError> {
    match op {
        Operand::Column(name) => {
            let idx = table.column_index(name)?;
            let kind = match table.columns[idx].ty {
                ColumnType::Int => Kind::Int,
                ColumnType::Varchar(_) => Kind::Text,
                ColumnType::Date => Kind::Date,
            };
            Ok((Bound::Col(idx), kind))
        }
        Operand::Literal(lit) => {
            let kind = match lit {
                Literal::Null => Kind::Null,
                Literal::Int(_) => Kind::Int,
                Literal::Str(_) => Kind::StrLit,
            };
            Ok((Bound::Lit(Value::from(lit)), kind))
        }
    }
}

fn comparable(a: (&Bound, Kind), b: (&Bound, Kind)) -> bool {
    use Kind::*;
    let date_literal_ok =
        |bound: &Bound| matches!(bound, Bound::Lit(Value::Text(s)) if is_valid_date(s));
    match (a.1, b.1) {
        (Null, _) | (_, Null) => true,
        (Int, Int) => true,
        (Text | StrLit, Text | StrLit) => true,
        (Date, Date) => true,
        (Date, StrLit) => date_literal_ok(b.0),
        (StrLit, Date) => date_literal_ok(a.0),
        _ => false,
    }
}

fn bind_expr(table: &TableState, expr: &Expr) -> Result<Pred, ExecError> {
    Ok(match expr {
        Expr::Compare { left, op, right } => {
            let l = bind_operand(table, left)?;
            let r = bind_operand(table, right)?;
            if !comparable((&l.0, l.1), (&r.0, r.1)) {
                return Err(ExecError::TypeMismatch(format!(
                    "cannot compare {left} with {right}"
                )));
            }
            Pred::Cmp(l.0, *op, r.0)
        }
        Expr::Like {
            operand,
            pattern,
            negated,
        } => {
            let l = bind_operand(table, operand)?;
            let p = bind_operand(table, pattern)?;
            if l.1 == Kind::Int || p.1 == Kind::Int {
                return Err(ExecError::TypeMismatch(format!(
                    "LIKE needs text operands: {operand} LIKE {pattern}"
                )));
            }
            Pred::Like(l.0, p.0, *negated)
        }
        Expr::IsNull { operand, negated } => {
            Pred::IsNull(bind_operand(table, operand)?.0, *negated)
        }
        Expr::Not(inner) => Pred::Not(Box::new(bind_expr(table, inner)?)),
        Expr::And(l, r) => Pred::And(
            Box::new(bind_expr(table, l)?),
            Box::new(bind_expr(table, r)?),
        ),
        Expr::Or(l, r) => Pred::Or(
            Box::new(bind_expr(table, l)?),
            Box::new(bind_expr(table, r)?),
        ),
    })
}

impl Pred {
    /// Three-valued evaluation; `None` is SQL UNKNOWN.
    fn eval(&self, row: &[Value]) -> Option<bool> {
        match self {
            Pred::Cmp(l, op, r) => {
                let (a, b) = (l.value(row), r.value(row));
                if a.is_null() || b.is_null() {
                    return None;
                }
                let ord = a.sort_cmp(b);
                Some(match op {
                    CmpOp::Eq => ord.is_eq(),
                    CmpOp::NotEq => ord.is_ne(),
                    CmpOp::Lt => ord.is_lt(),
                    CmpOp::LtEq => ord.is_le(),
                    CmpOp::Gt => ord.is_gt(),
                    CmpOp::GtEq => ord.is_ge(),
                })
            }
            Pred::Like(v, p, negated) => match (v.value(row), p.value(row)) {
                (Value::Text(text), Value::Text(pattern)) => {
                    Some(like_match(text, pattern) != *negated)
                }
                _ => None,
            },
            Pred::IsNull(v, negated) => Some(v.value(row).is_null() != *negated),
            Pred::Not(inner) => inner.eval(row).map(|b| !b),
            Pred::And(l, r) => match (l.eval(row), r.eval(row)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Pred::Or(l, r) => match (l.eval(row), r.eval(row)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sql::parse;

    fn run(db: &mut Database, sql: &str) -> Result<ExecOutcome, ExecError> {
        db.execute(&parse(sql).unwrap())
    }

    fn employees() -> Database {
        let mut db = Database::new();
        run(
            &mut db,
            "CREATE TABLE employee_info (id INT NOT NULL, name VARCHAR(30), job_status VARCHAR(20), hired DATE)",
        )
        .unwrap();
        run(
            &mut db,
            "INSERT INTO employee_info VALUES (1, 'Ana', 'employed', '2020-01-15'), (2, 'Ben', 'unemployed', NULL), (3, 'Cid', 'unemployed', '2019-07-01'), (4, NULL, NULL, NULL)",
        )
        .unwrap();
        db
    }

    #[test]
    fn insert_then_select_round_trip() {
        let mut db = Database::new();
        run(&mut db, "CREATE TABLE t (id INT, name VARCHAR(10))").unwrap();
        assert_eq!(
            run(&mut db, "INSERT INTO t VALUES (7, 'x')").unwrap(),
            ExecOutcome::Affected(1)
        );
        let out = run(&mut db, "SELECT * FROM t").unwrap();
        let rs = out.rows().unwrap();
        assert_eq!(rs.rows, vec![vec![Value::Int(7), Value::Text("x".into())]]);
    }

    #[test]
    fn delete_counts_matching_rows() {
        let mut db = employees();
        let out = run(
            &mut db,
            "DELETE FROM employee_info WHERE job_status='unemployed'",
        )
        .unwrap();
        assert_eq!(out, ExecOutcome::Affected(2));
        assert_eq!(db.table("employee_info").unwrap().rows.len(), 2);
    }

    #[test]
    fn describe_lists_structure() {
        let mut db = Database::new();
        run(
            &mut db,
            "CREATE TABLE tbl_phones (phone_id INT NOT NULL, model VARCHAR(40), released DATE)",
        )
        .unwrap();
        let out = run(&mut db, "DESCRIBE tbl_phones").unwrap();
        assert_eq!(
            out.rows().unwrap().serialize(),
            "Field|Type|Null\nphone_id|int|NO\nmodel|varchar(40)|YES\nreleased|date|YES"
        );
    }

    #[test]
    fn null_comparisons_are_unknown() {
        let mut db = employees();
        let eq = run(
            &mut db,
            "SELECT id FROM employee_info WHERE job_status = NULL",
        )
        .unwrap();
        assert!(eq.rows().unwrap().rows.is_empty());
        let not = run(
            &mut db,
            "SELECT id FROM employee_info WHERE NOT job_status = 'employed'",
        )
        .unwrap();
        assert_eq!(not.rows().unwrap().rows.len(), 2);
        let is = run(
            &mut db,
            "SELECT id FROM employee_info WHERE job_status IS NULL",
        )
        .unwrap();
        assert_eq!(is.rows().unwrap().rows, vec![vec![Value::Int(4)]]);
    }

    #[test]
    fn dates_compare_against_literals() {
        let mut db = employees();
        let out = run(
            &mut db,
            "SELECT name FROM employee_info WHERE hired < '2020-01-01'",
        )
        .unwrap();
        assert_eq!(
            out.rows().unwrap().rows,
            vec![vec![Value::Text("Cid".into())]]
        );
        assert!(matches!(
            run(
                &mut db,
                "SELECT name FROM employee_info WHERE hired < 'soon'"
            ),
            Err(ExecError::TypeMismatch(_))
        ));
        assert!(matches!(
            run(&mut db, "SELECT name FROM employee_info WHERE id = 'one'"),
            Err(ExecError::TypeMismatch(_))
        ));
    }

    #[test]
    fn error_paths() {
        let mut db = employees();
        assert_eq!(
            run(&mut db, "SELECT * FROM nope"),
            Err(ExecError::UnknownTable("nope".into()))
        );
        assert!(matches!(
            run(&mut db, "SELECT salary FROM employee_info"),
            Err(ExecError::UnknownColumn { .. })
        ));
        assert_eq!(
            run(&mut db, "CREATE TABLE employee_info (a INT)"),
            Err(ExecError::DuplicateTable("employee_info".into()))
        );
        assert_eq!(
            run(&mut db, "INSERT INTO employee_info VALUES (1, 'x')"),
            Err(ExecError::ArityMismatch {
                expected: 4,
                found: 2
            })
        );
        assert!(matches!(
            run(&mut db, "INSERT INTO employee_info (name) VALUES ('no id')"),
            Err(ExecError::TypeMismatch(_))
        ));
        assert!(matches!(
            run(&mut db, "GRANT ALL ON employee_info"),
            Err(ExecError::Unsupported(_))
        ));
    }

    #[test]
    fn failed_statement_leaves_database_untouched() {
        let mut db = employees();
        let before = db.clone();
        // second tuple fails, first must not be applied
        assert!(run(
            &mut db,
            "INSERT INTO employee_info VALUES (9, 'Z', 'x', NULL), (10, 'Y', 'x', 'bad-date')"
        )
        .is_err());
        assert!(run(&mut db, "UPDATE employee_info SET id = NULL WHERE id > 1").is_err());
        assert!(run(&mut db, "ALTER TABLE employee_info MODIFY COLUMN name INT").is_err());
        assert_eq!(db, before);
    }

    #[test]
    fn row_cap_is_enforced() {
        let mut db = Database::with_limits(Limits {
            max_rows: 2,
            ..Limits::default()
        });
        run(&mut db, "CREATE TABLE t (a INT)").unwrap();
        run(&mut db, "INSERT INTO t VALUES (1), (2)").unwrap();
        assert!(matches!(
            run(&mut db, "INSERT INTO t VALUES (3)"),
            Err(ExecError::ResourceLimit(_))
        ));
        assert_eq!(db.table("t").unwrap().rows.len(), 2);
    }

    #[test]
    fn time_budget_is_enforced() {
        let mut db = Database::with_limits(Limits {
            max_rows: 5000,
            budget: Duration::ZERO,
        });
        run(&mut db, "CREATE TABLE t (a INT)").unwrap();
        let values: Vec<String> = (0..200).map(|i| format!("({i})")).collect();
        run(
            &mut db,
            &format!("INSERT INTO t VALUES {}", values.join(", ")),
        )
        .unwrap();
        assert!(matches!(
            run(&mut db, "SELECT * FROM t WHERE a > 5"),
            Err(ExecError::ResourceLimit(_))
        ));
    }

    #[test]
    fn alter_table_variants() {
        let mut db = employees();
        run(&mut db, "ALTER TABLE employee_info ADD COLUMN salary INT").unwrap();
        assert_eq!(db.table("employee_info").unwrap().columns.len(), 5);
        run(&mut db, "ALTER TABLE employee_info DROP COLUMN hired").unwrap();
        run(&mut db, "ALTER TABLE employee_info MODIFY id VARCHAR(5)").unwrap();
        let out = run(&mut db, "SELECT id FROM employee_info WHERE id = '3'").unwrap();
        assert_eq!(out.rows().unwrap().rows.len(), 1);
        assert!(matches!(
            run(
                &mut db,
                "ALTER TABLE employee_info ADD COLUMN code INT NOT NULL"
            ),
            Err(ExecError::TypeMismatch(_))
        ));
    }

    #[test]
    fn fromless_select_fabricates_one_row() {
        let mut db = Database::new();
        let out = run(&mut db, "SELECT 1, 'Kenneth', 'Aguila'").unwrap();
        assert_eq!(
            out.rows().unwrap().serialize(),
            "1|Kenneth|Aguila\n1|Kenneth|Aguila"
        );
    }

    #[test]
    fn distinct_order_limit() {
        let mut db = employees();
        let out = run(
            &mut db,
            "SELECT DISTINCT job_status FROM employee_info WHERE job_status IS NOT NULL ORDER BY job_status DESC LIMIT 1",
        )
        .unwrap();
        assert_eq!(out.rows().unwrap().serialize(), "job_status\nunemployed");
    }
}
