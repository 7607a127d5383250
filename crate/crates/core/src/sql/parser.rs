//! Recursive-descent parser for the supported SQL subset.
//!
//! Exactly one statement is accepted per call. A `;` followed by anything
//! other than end of input is reported as [`ParseError::MultiStatement`]
//! before the statement itself is examined, so `a; b` is never half-parsed.

use super::ast::*;
use super::error::ParseError;
use super::lexer::{is_reserved, tokenize, Token, TokenKind};

const UNSUPPORTED_STARTS: &[&str] = &[
    "show",
    "use",
    "begin",
    "start",
    "commit",
    "rollback",
    "savepoint",
    "release",
    "with",
    "replace",
    "call",
    "set",
    "lock",
    "unlock",
    "rename",
    "load",
    "handler",
    "do",
    "explain",
    "merge",
    "prepare",
    "execute",
];

const JOIN_WORDS: &[&str] = &[
    "join", "inner", "left", "right", "outer", "cross", "natural", "full",
];

/// Parses exactly one statement of the supported subset.
pub fn parse(text: &str) -> Result<Statement, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    if let Some(pos) = tokens.iter().position(|t| t.kind == TokenKind::Semicolon) {
        if let Some(next) = tokens.get(pos + 1) {
            return Err(ParseError::MultiStatement {
                offset: next.offset,
            });
        }
    }

    let mut parser = Parser {
        tokens,
        pos: 0,
        end_offset: text.len(),
    };
    let stmt = parser.statement()?;
    parser.eat(&TokenKind::Semicolon);
    if let Some(tok) = parser.peek() {
        return Err(ParseError::syntax(
            tok.offset,
            &tok.text,
            "unexpected token",
        ));
    }
    Ok(stmt)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn advance(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end_offset, |t| t.offset)
    }

    fn error(&self, message: &str) -> ParseError {
        match self.peek() {
            Some(tok) => ParseError::syntax(tok.offset, &tok.text, message),
            None => ParseError::syntax(self.end_offset, "end of input", message),
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<(), ParseError> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {}", kw.to_ascii_uppercase())))
        }
    }

    fn peek_word(&self) -> Option<String> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Word(w)) => Some(w.to_ascii_lowercase()),
            _ => None,
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Word(w)) if !is_reserved(&w) => {
                self.pos += 1;
                if self.peek().is_some_and(|t| t.kind == TokenKind::Dot) {
                    return Err(ParseError::unsupported(self.offset(), "qualified names"));
                }
                Ok(w.to_ascii_lowercase())
            }
            Some(TokenKind::QuotedIdent(w)) => {
                self.pos += 1;
                Ok(w.to_lowercase())
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let Some(word) = self.peek_word() else {
            return Err(self.error("expected a statement keyword"));
        };
        let start = self.offset();
        match word.as_str() {
            "select" => self.select().map(Statement::Select),
            "insert" => self.insert(),
            "update" => self.update(),
            "delete" => self.delete(),
            "create" => self.create(),
            "drop" => self.drop_table(),
            "alter" => self.alter(),
            "truncate" => {
                self.advance();
                self.eat_keyword("table");
                let table = self.ident()?;
                Ok(Statement::Truncate { table })
            }
            "describe" | "desc" => {
                self.advance();
                let table = self.ident()?;
                Ok(Statement::Describe { table })
            }
            "grant" | "revoke" => self.dcl(),
            w if UNSUPPORTED_STARTS.contains(&w) => {
                Err(ParseError::unsupported(start, w.to_ascii_uppercase()))
            }
            _ => Err(self.error("unknown statement")),
        }
    }

    fn literal(&mut self) -> Result<Option<Literal>, ParseError> {
        let lit = match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Number(n)) => Literal::Int(n),
            Some(TokenKind::Str(s)) => Literal::Str(s),
            Some(TokenKind::Word(w)) if w.eq_ignore_ascii_case("null") => Literal::Null,
            Some(TokenKind::Minus) => match self.peek_at(1).map(|t| t.kind.clone()) {
                Some(TokenKind::Number(n)) => {
                    self.pos += 2;
                    return Ok(Some(Literal::Int(-n)));
                }
                _ => return Err(self.error("expected number after '-'")),
            },
            _ => return Ok(None),
        };
        self.pos += 1;
        Ok(Some(lit))
    }

    fn operand(&mut self) -> Result<Operand, ParseError> {
        if let Some(lit) = self.literal()? {
            return Ok(Operand::Literal(lit));
        }
        if self.peek().is_some_and(|t| t.kind == TokenKind::LParen) {
            if self.peek_at(1).is_some_and(|t| t.is_keyword("select")) {
                return Err(ParseError::unsupported(self.offset(), "subqueries"));
            }
            return Err(self.error("parenthesised values are not supported here"));
        }
        if let Some(TokenKind::Word(w)) = self.peek().map(|t| t.kind.clone()) {
            if self.peek_at(1).is_some_and(|t| t.kind == TokenKind::LParen) {
                return Err(ParseError::unsupported(
                    self.offset(),
                    format!("function {}()", w.to_ascii_uppercase()),
                ));
            }
        }
        Ok(Operand::Column(self.ident()?))
    }

    fn select(&mut self) -> Result<Select, ParseError> {
        self.expect_keyword("select")?;
        let distinct = self.eat_keyword("distinct");
        if !distinct {
            self.eat_keyword("all");
        }

        let mut items = Vec::new();
        if self.eat(&TokenKind::Star) {
            items.push(SelectItem::Wildcard);
        } else {
            loop {
                let operand = self.operand()?;
                let alias = if self.eat_keyword("as") {
                    Some(self.ident()?)
                } else {
                    match self.peek().map(|t| &t.kind) {
                        Some(TokenKind::Word(w)) if !is_reserved(w) => Some(self.ident()?),
                        Some(TokenKind::QuotedIdent(_)) => Some(self.ident()?),
                        _ => None,
                    }
                };
                items.push(SelectItem::Operand { operand, alias });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }

        let mut select = Select {
            distinct,
            items,
            from: None,
            selection: None,
            order_by: Vec::new(),
            limit: None,
        };

        if self.eat_keyword("from") {
            select.from = Some(self.ident()?);
            if let Some(w) = self.peek_word() {
                if JOIN_WORDS.contains(&w.as_str()) {
                    return Err(ParseError::unsupported(self.offset(), "joins"));
                }
            }
            if self.peek().is_some_and(|t| t.kind == TokenKind::Comma) {
                return Err(ParseError::unsupported(self.offset(), "joins"));
            }
            if self.eat_keyword("where") {
                select.selection = Some(self.expr()?);
            }
            self.reject_unsupported_clauses()?;
            if self.eat_keyword("order") {
                self.expect_keyword("by")?;
                loop {
                    let column = self.ident()?;
                    let descending = if self.eat_keyword("desc") {
                        true
                    } else {
                        self.eat_keyword("asc");
                        false
                    };
                    select.order_by.push(OrderItem { column, descending });
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
        } else if select.items.contains(&SelectItem::Wildcard) {
            return Err(self.error("SELECT * requires FROM"));
        }

        self.reject_unsupported_clauses()?;
        if self.eat_keyword("limit") {
            match self.advance().map(|t| t.kind) {
                Some(TokenKind::Number(n)) if n >= 0 => select.limit = Some(n as u64),
                _ => {
                    self.pos -= 1;
                    return Err(self.error("expected row count after LIMIT"));
                }
            }
            if self.at_keyword("offset") || self.peek().is_some_and(|t| t.kind == TokenKind::Comma)
            {
                return Err(ParseError::unsupported(self.offset(), "LIMIT offsets"));
            }
        }
        self.reject_unsupported_clauses()?;
        Ok(select)
    }

    fn reject_unsupported_clauses(&self) -> Result<(), ParseError> {
        match self.peek_word().as_deref() {
            Some("group") => Err(ParseError::unsupported(self.offset(), "GROUP BY")),
            Some("having") => Err(ParseError::unsupported(self.offset(), "HAVING")),
            Some("union") => Err(ParseError::unsupported(self.offset(), "UNION")),
            _ => Ok(()),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.and_expr()?;
        while self.eat_keyword("or") {
            let right = self.and_expr()?;
            left = Expr::or(left, right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.not_expr()?;
        while self.eat_keyword("and") {
            let right = self.not_expr()?;
            left = Expr::and(left, right);
        }
        Ok(left)
    }

    fn not_expr(&mut self) -> Result<Expr, ParseError> {
        if self.eat_keyword("not") {
            return Ok(Expr::not(self.not_expr()?));
        }
        self.predicate()
    }

    fn predicate(&mut self) -> Result<Expr, ParseError> {
        if self.peek().is_some_and(|t| t.kind == TokenKind::LParen) {
            if self.peek_at(1).is_some_and(|t| t.is_keyword("select")) {
                return Err(ParseError::unsupported(self.offset(), "subqueries"));
            }
            self.advance();
            let inner = self.expr()?;
            self.expect(&TokenKind::RParen, "')'")?;
            return Ok(inner);
        }

        let left = self.operand()?;
        let op = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Eq) => Some(CmpOp::Eq),
            Some(TokenKind::NotEq) => Some(CmpOp::NotEq),
            Some(TokenKind::Lt) => Some(CmpOp::Lt),
            Some(TokenKind::LtEq) => Some(CmpOp::LtEq),
            Some(TokenKind::Gt) => Some(CmpOp::Gt),
            Some(TokenKind::GtEq) => Some(CmpOp::GtEq),
            _ => None,
        };
        if let Some(op) = op {
            self.advance();
            let right = self.operand()?;
            return Ok(Expr::Compare { left, op, right });
        }

        if self.eat_keyword("is") {
            let negated = self.eat_keyword("not");
            self.expect_keyword("null")?;
            return Ok(Expr::IsNull {
                operand: left,
                negated,
            });
        }

        let negated = if self.at_keyword("not") {
            match self.peek_at(1) {
                Some(t) if t.is_keyword("like") => {
                    self.advance();
                    true
                }
                Some(t) if t.is_keyword("in") || t.is_keyword("between") => {
                    return Err(ParseError::unsupported(
                        t.offset,
                        format!("NOT {}", t.text.to_ascii_uppercase()),
                    ));
                }
                _ => return Err(self.error("expected LIKE after NOT")),
            }
        } else {
            false
        };
        if self.eat_keyword("like") {
            let pattern = self.operand()?;
            return Ok(Expr::Like {
                operand: left,
                pattern,
                negated,
            });
        }
        if self.at_keyword("in") || self.at_keyword("between") {
            let word = self.peek_word().unwrap_or_default().to_ascii_uppercase();
            return Err(ParseError::unsupported(self.offset(), word));
        }
        Err(self.error("expected comparison operator"))
    }

    fn insert(&mut self) -> Result<Statement, ParseError> {
        self.expect_keyword("insert")?;
        self.expect_keyword("into")?;
        let table = self.ident()?;
        let columns = if self.eat(&TokenKind::LParen) {
            let mut cols = vec![self.ident()?];
            while self.eat(&TokenKind::Comma) {
                cols.push(self.ident()?);
            }
            self.expect(&TokenKind::RParen, "')'")?;
            Some(cols)
        } else {
            None
        };
        if self.at_keyword("select") {
            return Err(ParseError::unsupported(self.offset(), "INSERT ... SELECT"));
        }
        self.expect_keyword("values")?;
        let mut rows = Vec::new();
        loop {
            self.expect(&TokenKind::LParen, "'('")?;
            let mut values = Vec::new();
            loop {
                match self.literal()? {
                    Some(lit) => values.push(lit),
                    None => return Err(self.error("expected literal value")),
                }
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(&TokenKind::RParen, "')'")?;
            rows.push(values);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(Statement::Insert {
            table,
            columns,
            rows,
        })
    }

    fn update(&mut self) -> Result<Statement, ParseError> {
        self.expect_keyword("update")?;
        let table = self.ident()?;
        self.expect_keyword("set")?;
        let mut assignments = Vec::new();
        loop {
            let column = self.ident()?;
            self.expect(&TokenKind::Eq, "'='")?;
            match self.literal()? {
                Some(lit) => assignments.push((column, lit)),
                None => {
                    return Err(ParseError::unsupported(
                        self.offset(),
                        "non-literal assignment values",
                    ))
                }
            }
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        let selection = if self.eat_keyword("where") {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(Statement::Update {
            table,
            assignments,
            selection,
        })
    }

    fn delete(&mut self) -> Result<Statement, ParseError> {
        self.expect_keyword("delete")?;
        self.expect_keyword("from")?;
        let table = self.ident()?;
        let selection = if self.eat_keyword("where") {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(Statement::Delete { table, selection })
    }

    fn column_def(&mut self) -> Result<ColumnDef, ParseError> {
        let name = self.ident()?;
        let ty_offset = self.offset();
        let ty = match self.peek_word().as_deref() {
            Some("int") | Some("integer") => {
                self.advance();
                ColumnType::Int
            }
            Some("date") => {
                self.advance();
                ColumnType::Date
            }
            Some("varchar") => {
                self.advance();
                self.expect(&TokenKind::LParen, "'('")?;
                let n = match self.peek().map(|t| t.kind.clone()) {
                    Some(TokenKind::Number(n)) if n > 0 && n <= u32::MAX as i64 => n as u32,
                    _ => return Err(self.error("expected positive VARCHAR length")),
                };
                self.advance();
                self.expect(&TokenKind::RParen, "')'")?;
                ColumnType::Varchar(n)
            }
            Some(other) => {
                return Err(ParseError::unsupported(
                    ty_offset,
                    format!("column type {}", other.to_ascii_uppercase()),
                ))
            }
            None => return Err(self.error("expected column type")),
        };
        let nullable = if self.eat_keyword("not") {
            self.expect_keyword("null")?;
            false
        } else {
            self.eat_keyword("null");
            true
        };
        if let Some(w) = self.peek_word() {
            if !is_reserved(&w) {
                return Err(ParseError::unsupported(
                    self.offset(),
                    format!("column constraint {}", w.to_ascii_uppercase()),
                ));
            }
        }
        Ok(ColumnDef { name, ty, nullable })
    }

    fn create(&mut self) -> Result<Statement, ParseError> {
        self.expect_keyword("create")?;
        if !self.eat_keyword("table") {
            return match self.peek_word() {
                Some(w) => Err(ParseError::unsupported(
                    self.offset(),
                    format!("CREATE {}", w.to_ascii_uppercase()),
                )),
                None => Err(self.error("expected TABLE")),
            };
        }
        let table = self.ident()?;
        self.expect(&TokenKind::LParen, "'('")?;
        let mut columns = vec![self.column_def()?];
        while self.eat(&TokenKind::Comma) {
            if self.at_keyword("primary") || self.at_keyword("foreign") || self.at_keyword("unique")
            {
                return Err(ParseError::unsupported(self.offset(), "table constraints"));
            }
            columns.push(self.column_def()?);
        }
        self.expect(&TokenKind::RParen, "')'")?;
        Ok(Statement::CreateTable { table, columns })
    }

    fn drop_table(&mut self) -> Result<Statement, ParseError> {
        self.expect_keyword("drop")?;
        if !self.eat_keyword("table") {
            return match self.peek_word() {
                Some(w) => Err(ParseError::unsupported(
                    self.offset(),
                    format!("DROP {}", w.to_ascii_uppercase()),
                )),
                None => Err(self.error("expected TABLE")),
            };
        }
        if self.at_keyword("if") {
            return Err(ParseError::unsupported(self.offset(), "IF EXISTS"));
        }
        let table = self.ident()?;
        Ok(Statement::DropTable { table })
    }

    fn alter(&mut self) -> Result<Statement, ParseError> {
        self.expect_keyword("alter")?;
        self.expect_keyword("table")?;
        let table = self.ident()?;
        let action = if self.eat_keyword("add") {
            self.eat_keyword("column");
            AlterAction::AddColumn(self.column_def()?)
        } else if self.eat_keyword("drop") {
            self.eat_keyword("column");
            AlterAction::DropColumn(self.ident()?)
        } else if self.eat_keyword("modify") {
            self.eat_keyword("column");
            AlterAction::ModifyColumn(self.column_def()?)
        } else {
            return match self.peek_word() {
                Some(w) => Err(ParseError::unsupported(
                    self.offset(),
                    format!("ALTER TABLE ... {}", w.to_ascii_uppercase()),
                )),
                None => Err(self.error("expected ADD, DROP or MODIFY")),
            };
        };
        Ok(Statement::AlterTable { table, action })
    }

    fn dcl(&mut self) -> Result<Statement, ParseError> {
        let verb = match self.peek_word().as_deref() {
            Some("grant") => DclVerb::Grant,
            _ => DclVerb::Revoke,
        };
        self.advance();
        let mut body = Vec::new();
        while let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Semicolon {
                break;
            }
            body.push(match &tok.kind {
                TokenKind::Word(w) => w.to_ascii_lowercase(),
                TokenKind::QuotedIdent(w) => super::lexer::quote_ident(&w.to_lowercase()),
                TokenKind::Str(s) => Literal::Str(s.clone()).to_string(),
                TokenKind::Number(n) => n.to_string(),
                _ => tok.text.clone(),
            });
            self.advance();
        }
        if body.is_empty() {
            return Err(self.error("expected privileges"));
        }
        Ok(Statement::Dcl { verb, body })
    }
}
