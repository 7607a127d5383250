//! A deliberately naive reference evaluator for random single-table
//! workloads. It shares no code with the engine: values, predicates, LIKE,
//! ordering and serialisation are all written out again here.

use std::cmp::Ordering;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Int,
    Text,
    Date,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum V {
    Null,
    I(i64),
    S(String),
}

#[derive(Debug, Clone)]
pub struct Col {
    pub name: String,
    pub ty: Ty,
    pub nullable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone)]
pub enum Term {
    Col(usize),
    Lit(V),
}

#[derive(Debug, Clone)]
pub enum Pred {
    Cmp(Term, Op, Term),
    Like(usize, String, bool),
    IsNull(usize, bool),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

#[derive(Debug, Clone)]
pub enum Item {
    Star,
    Col(usize, Option<String>),
    Lit(V, Option<String>),
}

#[derive(Debug, Clone)]
pub enum Mutation {
    Insert(Vec<V>),
    Update(usize, V, Option<Pred>),
    Delete(Option<Pred>),
}

#[derive(Debug, Clone)]
pub struct Query {
    pub distinct: bool,
    pub items: Vec<Item>,
    pub filter: Option<Pred>,
    pub order: Vec<(usize, bool)>,
    pub limit: Option<usize>,
}

/// A generated workload: the SQL statements to run in order (the last one is
/// the SELECT) plus the structured form the oracle evaluates.
#[derive(Debug, Clone)]
pub struct Workload {
    pub seed: u64,
    pub statements: Vec<String>,
    pub columns: Vec<Col>,
    pub rows: Vec<Vec<V>>,
    pub mutations: Vec<Mutation>,
    pub query: Query,
}

const TEXTS: &[&str] = &["a", "b", "ab", "ba", "A", "", "a_b", "it's", "%x"];
const DATES: &[&str] = &["2020-01-01", "2021-06-15", "2019-12-31", "2020-01-02"];
const PATTERNS: &[&str] = &["a%", "%b", "_", "a_b", "%", "", "A%", "%'%", "_a"];

fn cmp_vals(a: &V, b: &V) -> Ordering {
    let rank = |v: &V| match v {
        V::Null => 0,
        V::I(_) => 1,
        V::S(_) => 2,
    };
    match (a, b) {
        (V::I(x), V::I(y)) => x.cmp(y),
        (V::S(x), V::S(y)) => x.as_bytes().cmp(y.as_bytes()),
        _ => rank(a).cmp(&rank(b)),
    }
}

/// Recursive wildcard match over chars.
fn like(text: &[char], pat: &[char]) -> bool {
    match pat.first() {
        None => text.is_empty(),
        Some('%') => (0..=text.len()).any(|i| like(&text[i..], &pat[1..])),
        Some('_') => !text.is_empty() && like(&text[1..], &pat[1..]),
        Some(c) => text.first() == Some(c) && like(&text[1..], &pat[1..]),
    }
}

fn term(row: &[V], t: &Term) -> V {
    match t {
        Term::Col(i) => row[*i].clone(),
        Term::Lit(v) => v.clone(),
    }
}

/// Three-valued evaluation; `None` is unknown.
fn eval(row: &[V], p: &Pred) -> Option<bool> {
    match p {
        Pred::Cmp(l, op, r) => {
            let (a, b) = (term(row, l), term(row, r));
            if a == V::Null || b == V::Null {
                return None;
            }
            let o = cmp_vals(&a, &b);
            Some(match op {
                Op::Eq => o == Ordering::Equal,
                Op::Ne => o != Ordering::Equal,
                Op::Lt => o == Ordering::Less,
                Op::Le => o != Ordering::Greater,
                Op::Gt => o == Ordering::Greater,
                Op::Ge => o != Ordering::Less,
            })
        }
        Pred::Like(c, pat, neg) => match &row[*c] {
            V::S(s) => {
                let t: Vec<char> = s.chars().collect();
                let p: Vec<char> = pat.chars().collect();
                Some(like(&t, &p) != *neg)
            }
            _ => None,
        },
        Pred::IsNull(c, neg) => Some((row[*c] == V::Null) != *neg),
        Pred::Not(inner) => eval(row, inner).map(|b| !b),
        Pred::And(l, r) => match (eval(row, l), eval(row, r)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Pred::Or(l, r) => match (eval(row, l), eval(row, r)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
    }
}

fn passes(row: &[V], p: &Option<Pred>) -> bool {
    p.as_ref().is_none_or(|p| eval(row, p) == Some(true))
}

fn show(v: &V) -> String {
    match v {
        V::Null => "NULL".into(),
        V::I(i) => i.to_string(),
        V::S(s) => s.clone(),
    }
}

impl Workload {
    /// Table contents after the mutations, computed without the engine.
    pub fn final_rows(&self) -> Vec<Vec<V>> {
        let mut rows = self.rows.clone();
        for m in &self.mutations {
            match m {
                Mutation::Insert(r) => rows.push(r.clone()),
                Mutation::Update(c, v, p) => {
                    for r in rows.iter_mut().filter(|r| passes(r, p)) {
                        r[*c] = v.clone();
                    }
                }
                Mutation::Delete(p) => rows.retain(|r| !passes(r, p)),
            }
        }
        rows
    }

    /// Expected canonical serialisation of the final SELECT.
    pub fn expected(&self) -> String {
        let q = &self.query;
        let mut rows: Vec<Vec<V>> = self
            .final_rows()
            .into_iter()
            .filter(|r| passes(r, &q.filter))
            .collect();
        if !q.order.is_empty() {
            // insertion sort keeps ties in input order
            let mut sorted: Vec<Vec<V>> = Vec::with_capacity(rows.len());
            for r in rows {
                let pos = sorted
                    .iter()
                    .position(|s| {
                        for &(c, desc) in &q.order {
                            let mut o = cmp_vals(&r[c], &s[c]);
                            if desc {
                                o = o.reverse();
                            }
                            if o != Ordering::Equal {
                                return o == Ordering::Less;
                            }
                        }
                        false
                    })
                    .unwrap_or(sorted.len());
                sorted.insert(pos, r);
            }
            rows = sorted;
        }
        let mut header = Vec::new();
        for item in &q.items {
            match item {
                Item::Star => header.extend(self.columns.iter().map(|c| c.name.clone())),
                Item::Col(c, a) => header.push(a.clone().unwrap_or(self.columns[*c].name.clone())),
                Item::Lit(v, a) => header.push(a.clone().unwrap_or(show(v))),
            }
        }
        let mut out: Vec<Vec<V>> = Vec::new();
        for r in &rows {
            let mut p = Vec::new();
            for item in &q.items {
                match item {
                    Item::Star => p.extend(r.iter().cloned()),
                    Item::Col(c, _) => p.push(r[*c].clone()),
                    Item::Lit(v, _) => p.push(v.clone()),
                }
            }
            if q.distinct && out.contains(&p) {
                continue;
            }
            out.push(p);
        }
        if let Some(n) = q.limit {
            out.truncate(n);
        }
        let mut lines: Vec<String> = out
            .iter()
            .map(|r| r.iter().map(show).collect::<Vec<_>>().join("|"))
            .collect();
        if q.order.is_empty() {
            lines.sort();
        }
        let mut s = header.join("|");
        for l in lines {
            s.push('\n');
            s.push_str(&l);
        }
        s
    }
}

/// Seeded generator of small, always-valid workloads over one table `t`.
#[derive(Debug)]
pub struct WorkloadGen {
    rng: ChaCha8Rng,
    upper: bool,
}

impl WorkloadGen {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            upper: true,
        }
    }

    fn kw(&self, s: &str) -> String {
        if self.upper {
            s.to_uppercase()
        } else {
            s.to_lowercase()
        }
    }

    fn value(&mut self, col: &Col) -> V {
        if col.nullable && self.rng.random_bool(0.15) {
            return V::Null;
        }
        self.non_null(col.ty)
    }

    fn non_null(&mut self, ty: Ty) -> V {
        match ty {
            Ty::Int => V::I(self.rng.random_range(-3..=3)),
            Ty::Text => V::S(TEXTS.choose(&mut self.rng).unwrap().to_string()),
            Ty::Date => V::S(DATES.choose(&mut self.rng).unwrap().to_string()),
        }
    }

    fn lit(&self, v: &V) -> String {
        match v {
            V::Null => self.kw("null"),
            V::I(i) => i.to_string(),
            V::S(s) => format!("'{}'", s.replace('\'', "''")),
        }
    }

    fn atom(&mut self, cols: &[Col]) -> Pred {
        let c = self.rng.random_range(0..cols.len());
        let ty = cols[c].ty;
        match self.rng.random_range(0..10) {
            0 | 1 => Pred::IsNull(c, self.rng.random_bool(0.5)),
            2 | 3 if ty == Ty::Text => {
                let pat = PATTERNS.choose(&mut self.rng).unwrap().to_string();
                Pred::Like(c, pat, self.rng.random_bool(0.3))
            }
            _ => {
                let op = *[Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge]
                    .choose(&mut self.rng)
                    .unwrap();
                let same: Vec<usize> = (0..cols.len()).filter(|&i| cols[i].ty == ty).collect();
                let rhs = match self.rng.random_range(0..10) {
                    0 => Term::Lit(V::Null),
                    1 | 2 => Term::Col(*same.choose(&mut self.rng).unwrap()),
                    _ => Term::Lit(self.non_null(ty)),
                };
                if self.rng.random_bool(0.2) {
                    let flipped = match op {
                        Op::Lt => Op::Gt,
                        Op::Le => Op::Ge,
                        Op::Gt => Op::Lt,
                        Op::Ge => Op::Le,
                        o => o,
                    };
                    Pred::Cmp(rhs, flipped, Term::Col(c))
                } else {
                    Pred::Cmp(Term::Col(c), op, rhs)
                }
            }
        }
    }

    fn pred(&mut self, cols: &[Col], depth: u32) -> Pred {
        if depth == 0 || self.rng.random_bool(0.5) {
            return self.atom(cols);
        }
        match self.rng.random_range(0..3) {
            0 => Pred::Not(Box::new(self.pred(cols, depth - 1))),
            1 => Pred::And(
                Box::new(self.pred(cols, depth - 1)),
                Box::new(self.pred(cols, depth - 1)),
            ),
            _ => Pred::Or(
                Box::new(self.pred(cols, depth - 1)),
                Box::new(self.pred(cols, depth - 1)),
            ),
        }
    }

    fn maybe_pred(&mut self, cols: &[Col]) -> Option<Pred> {
        self.rng.random_bool(0.7).then(|| self.pred(cols, 2))
    }

    fn render_term(&self, cols: &[Col], t: &Term) -> String {
        match t {
            Term::Col(i) => cols[*i].name.clone(),
            Term::Lit(v) => self.lit(v),
        }
    }

    // Every compound is parenthesised, so no precedence reasoning is needed.
    fn render_pred(&self, cols: &[Col], p: &Pred) -> String {
        match p {
            Pred::Cmp(l, op, r) => {
                let o = match op {
                    Op::Eq => "=",
                    Op::Ne => "<>",
                    Op::Lt => "<",
                    Op::Le => "<=",
                    Op::Gt => ">",
                    Op::Ge => ">=",
                };
                format!(
                    "{} {o} {}",
                    self.render_term(cols, l),
                    self.render_term(cols, r)
                )
            }
            Pred::Like(c, pat, neg) => format!(
                "{} {}{} '{}'",
                cols[*c].name,
                if *neg { self.kw("not ") } else { String::new() },
                self.kw("like"),
                pat.replace('\'', "''")
            ),
            Pred::IsNull(c, neg) => format!(
                "{} {} {}{}",
                cols[*c].name,
                self.kw("is"),
                if *neg { self.kw("not ") } else { String::new() },
                self.kw("null")
            ),
            Pred::Not(inner) => format!("{} ({})", self.kw("not"), self.render_pred(cols, inner)),
            Pred::And(l, r) => format!(
                "({}) {} ({})",
                self.render_pred(cols, l),
                self.kw("and"),
                self.render_pred(cols, r)
            ),
            Pred::Or(l, r) => format!(
                "({}) {} ({})",
                self.render_pred(cols, l),
                self.kw("or"),
                self.render_pred(cols, r)
            ),
        }
    }

    fn render_where(&self, cols: &[Col], p: &Option<Pred>) -> String {
        match p {
            Some(p) => format!(" {} {}", self.kw("where"), self.render_pred(cols, p)),
            None => String::new(),
        }
    }

    pub fn generate(&mut self, seed: u64) -> Workload {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.upper = self.rng.random_bool(0.5);
        let ncols = self.rng.random_range(1..=3);
        let columns: Vec<Col> = (0..ncols)
            .map(|i| Col {
                name: format!("c{i}"),
                ty: *[Ty::Int, Ty::Text, Ty::Date].choose(&mut self.rng).unwrap(),
                nullable: self.rng.random_bool(0.6),
            })
            .collect();
        let defs: Vec<String> = columns
            .iter()
            .map(|c| {
                let ty = match c.ty {
                    Ty::Int => self.kw("int"),
                    Ty::Text => format!("{}(10)", self.kw("varchar")),
                    Ty::Date => self.kw("date"),
                };
                let nn = if c.nullable {
                    String::new()
                } else {
                    format!(" {}", self.kw("not null"))
                };
                format!("{} {ty}{nn}", c.name)
            })
            .collect();
        let mut statements = vec![format!(
            "{} t ({})",
            self.kw("create table"),
            defs.join(", ")
        )];

        let nrows = self.rng.random_range(0..=10);
        let rows: Vec<Vec<V>> = (0..nrows)
            .map(|_| columns.iter().map(|c| self.value(c)).collect())
            .collect();
        if !rows.is_empty() {
            statements.push(self.render_insert(&columns, &rows));
        }

        let mut mutations = Vec::new();
        for _ in 0..self.rng.random_range(0..=3) {
            let m = match self.rng.random_range(0..3) {
                0 => {
                    let row: Vec<V> = columns.iter().map(|c| self.value(c)).collect();
                    statements.push(self.render_insert(&columns, std::slice::from_ref(&row)));
                    Mutation::Insert(row)
                }
                1 => {
                    let c = self.rng.random_range(0..ncols);
                    let v = self.value(&columns[c]);
                    let p = self.maybe_pred(&columns);
                    statements.push(format!(
                        "{} t {} {} = {}{}",
                        self.kw("update"),
                        self.kw("set"),
                        columns[c].name,
                        self.lit(&v),
                        self.render_where(&columns, &p)
                    ));
                    Mutation::Update(c, v, p)
                }
                _ => {
                    let p = self.maybe_pred(&columns);
                    statements.push(format!(
                        "{} t{}",
                        self.kw("delete from"),
                        self.render_where(&columns, &p)
                    ));
                    Mutation::Delete(p)
                }
            };
            mutations.push(m);
        }

        let query = self.query(&columns);
        statements.push(self.render_query(&columns, &query));
        Workload {
            seed,
            statements,
            columns,
            rows,
            mutations,
            query,
        }
    }

    fn render_insert(&mut self, cols: &[Col], rows: &[Vec<V>]) -> String {
        // sometimes name the columns, in a shuffled order
        let mut order: Vec<usize> = (0..cols.len()).collect();
        let named = self.rng.random_bool(0.4);
        if named {
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut self.rng);
        }
        let tuples: Vec<String> = rows
            .iter()
            .map(|r| {
                let vals: Vec<String> = order.iter().map(|&i| self.lit(&r[i])).collect();
                format!("({})", vals.join(", "))
            })
            .collect();
        let names = if named {
            let n: Vec<&str> = order.iter().map(|&i| cols[i].name.as_str()).collect();
            format!(" ({})", n.join(", "))
        } else {
            String::new()
        };
        format!(
            "{} t{names} {} {}",
            self.kw("insert into"),
            self.kw("values"),
            tuples.join(", ")
        )
    }

    fn query(&mut self, cols: &[Col]) -> Query {
        let items = if self.rng.random_bool(0.3) {
            vec![Item::Star]
        } else {
            let mut alias_no = 0;
            (0..self.rng.random_range(1..=3))
                .map(|_| {
                    let alias = self.rng.random_bool(0.2).then(|| {
                        alias_no += 1;
                        format!("x{alias_no}")
                    });
                    if self.rng.random_bool(0.15) {
                        let v = if self.rng.random_bool(0.5) {
                            V::I(self.rng.random_range(-3..=3))
                        } else {
                            V::S(["k", "z", "ab"].choose(&mut self.rng).unwrap().to_string())
                        };
                        Item::Lit(v, alias)
                    } else {
                        Item::Col(self.rng.random_range(0..cols.len()), alias)
                    }
                })
                .collect()
        };
        let distinct = self.rng.random_bool(0.25);
        let selected: Vec<usize> = if distinct {
            items
                .iter()
                .flat_map(|i| match i {
                    Item::Star => (0..cols.len()).collect(),
                    Item::Col(c, _) => vec![*c],
                    Item::Lit(..) => vec![],
                })
                .collect()
        } else {
            (0..cols.len()).collect()
        };
        let mut order = Vec::new();
        if !selected.is_empty() && self.rng.random_bool(0.5) {
            for _ in 0..self.rng.random_range(1..=2) {
                let c = *selected.choose(&mut self.rng).unwrap();
                order.push((c, self.rng.random_bool(0.5)));
            }
        }
        Query {
            distinct,
            items,
            filter: self.maybe_pred(cols),
            order,
            limit: self
                .rng
                .random_bool(0.3)
                .then(|| self.rng.random_range(0..=5)),
        }
    }

    fn render_query(&self, cols: &[Col], q: &Query) -> String {
        let items: Vec<String> = q
            .items
            .iter()
            .map(|i| {
                let (body, alias) = match i {
                    Item::Star => ("*".to_string(), &None),
                    Item::Col(c, a) => (cols[*c].name.clone(), a),
                    Item::Lit(v, a) => (self.lit(v), a),
                };
                match alias {
                    Some(a) => format!("{body} {} {a}", self.kw("as")),
                    None => body,
                }
            })
            .collect();
        let mut s = self.kw("select ");
        if q.distinct {
            s.push_str(&self.kw("distinct "));
        }
        s.push_str(&items.join(", "));
        s.push_str(&format!(" {} t", self.kw("from")));
        s.push_str(&self.render_where(cols, &q.filter));
        if !q.order.is_empty() {
            let keys: Vec<String> = q
                .order
                .iter()
                .map(|&(c, d)| {
                    format!(
                        "{} {}",
                        cols[c].name,
                        self.kw(if d { "desc" } else { "asc" })
                    )
                })
                .collect();
            s.push_str(&format!(" {} {}", self.kw("order by"), keys.join(", ")));
        }
        if let Some(n) = q.limit {
            s.push_str(&format!(" {} {n}", self.kw("limit")));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_basics() {
        let c = |s: &str| s.chars().collect::<Vec<_>>();
        assert!(like(&c("abc"), &c("a%")));
        assert!(like(&c("abc"), &c("_b_")));
        assert!(!like(&c("abc"), &c("A%")));
        assert!(like(&c(""), &c("%")));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = WorkloadGen::new(0).generate(7);
        let b = WorkloadGen::new(1).generate(7);
        assert_eq!(a.statements, b.statements);
    }
}
