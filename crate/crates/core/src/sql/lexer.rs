use super::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Bare word: keyword or identifier. Original spelling kept.
    Word(String),
    /// Backtick-quoted identifier.
    QuotedIdent(String),
    Number(i64),
    Str(String),
    Comma,
    LParen,
    RParen,
    Semicolon,
    Star,
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    Minus,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub offset: usize,
    pub text: String,
}

impl Token {
    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.kind, TokenKind::Word(w) if w.eq_ignore_ascii_case(kw))
    }
}

/// Words that cannot be used as bare identifiers.
pub const RESERVED: &[&str] = &[
    "add", "all", "alter", "and", "as", "asc", "between", "by", "column", "create", "delete",
    "desc", "describe", "distinct", "drop", "exists", "from", "grant", "group", "having", "in",
    "inner", "insert", "into", "is", "join", "left", "like", "limit", "modify", "not", "null",
    "offset", "on", "or", "order", "outer", "revoke", "right", "select", "set", "table",
    "truncate", "union", "update", "values", "where",
];

pub fn is_reserved(word: &str) -> bool {
    let lower = word.to_ascii_lowercase();
    RESERVED.contains(&lower.as_str())
}

/// Renders an identifier so that it lexes back to the same name.
pub fn quote_ident(name: &str) -> String {
    let bare_ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '$')
        && !name.chars().all(|c| c.is_ascii_digit())
        && !is_reserved(name);
    if bare_ok {
        name.to_string()
    } else {
        format!("`{}`", name.replace('`', "``"))
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

pub fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < bytes.len() {
        let c = input[i..].chars().next().expect("in bounds");
        let start = i;

        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if input[i..].starts_with("--") || c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if input[i..].starts_with("/*") {
            match input[i + 2..].find("*/") {
                Some(end) => i += end + 4,
                None => return Err(ParseError::syntax(start, "/*", "unterminated comment")),
            }
            continue;
        }

        let single = |kind: TokenKind, len: usize| Token {
            kind,
            offset: start,
            text: input[start..start + len].to_string(),
        };

        match c {
            ',' => {
                tokens.push(single(TokenKind::Comma, 1));
                i += 1;
            }
            '(' => {
                tokens.push(single(TokenKind::LParen, 1));
                i += 1;
            }
            ')' => {
                tokens.push(single(TokenKind::RParen, 1));
                i += 1;
            }
            ';' => {
                tokens.push(single(TokenKind::Semicolon, 1));
                i += 1;
            }
            '*' => {
                tokens.push(single(TokenKind::Star, 1));
                i += 1;
            }
            '-' => {
                tokens.push(single(TokenKind::Minus, 1));
                i += 1;
            }
            '.' => {
                tokens.push(single(TokenKind::Dot, 1));
                i += 1;
            }
            '=' => {
                tokens.push(single(TokenKind::Eq, 1));
                i += 1;
            }
            '!' => {
                if input[i..].starts_with("!=") {
                    tokens.push(single(TokenKind::NotEq, 2));
                    i += 2;
                } else {
                    return Err(ParseError::syntax(start, "!", "unexpected character"));
                }
            }
            '<' => {
                if input[i..].starts_with("<=") {
                    tokens.push(single(TokenKind::LtEq, 2));
                    i += 2;
                } else if input[i..].starts_with("<>") {
                    tokens.push(single(TokenKind::NotEq, 2));
                    i += 2;
                } else {
                    tokens.push(single(TokenKind::Lt, 1));
                    i += 1;
                }
            }
            '>' => {
                if input[i..].starts_with(">=") {
                    tokens.push(single(TokenKind::GtEq, 2));
                    i += 2;
                } else {
                    tokens.push(single(TokenKind::Gt, 1));
                    i += 1;
                }
            }
            '\'' | '"' => {
                let (value, end) = lex_quoted(input, i, c)?;
                tokens.push(Token {
                    kind: TokenKind::Str(value),
                    offset: start,
                    text: input[start..end].to_string(),
                });
                i = end;
            }
            '`' => {
                let (value, end) = lex_quoted(input, i, '`')?;
                if value.is_empty() {
                    return Err(ParseError::syntax(start, "``", "empty identifier"));
                }
                tokens.push(Token {
                    kind: TokenKind::QuotedIdent(value),
                    offset: start,
                    text: input[start..end].to_string(),
                });
                i = end;
            }
            c if is_word_char(c) => {
                let mut end = i;
                while end < bytes.len() && is_word_char(bytes[end] as char) {
                    end += 1;
                }
                let text = &input[start..end];
                let kind = if text.bytes().all(|b| b.is_ascii_digit()) {
                    let n = text
                        .parse::<i64>()
                        .map_err(|_| ParseError::syntax(start, text, "integer out of range"))?;
                    TokenKind::Number(n)
                } else {
                    TokenKind::Word(text.to_string())
                };
                tokens.push(Token {
                    kind,
                    offset: start,
                    text: text.to_string(),
                });
                i = end;
            }
            other => {
                return Err(ParseError::syntax(
                    start,
                    &other.to_string(),
                    "unexpected character",
                ))
            }
        }
    }
    Ok(tokens)
}

/// Lexes a quoted run starting at `start`. A doubled quote stands for one
/// literal quote; inside string literals a backslash escapes the next char.
fn lex_quoted(input: &str, start: usize, quote: char) -> Result<(String, usize), ParseError> {
    let mut value = String::new();
    let mut chars = input[start + 1..].char_indices().peekable();
    while let Some((off, c)) = chars.next() {
        let abs = start + 1 + off;
        if c == quote {
            if let Some(&(_, next)) = chars.peek() {
                if next == quote {
                    value.push(quote);
                    chars.next();
                    continue;
                }
            }
            return Ok((value, abs + 1));
        }
        if c == '\\' && quote != '`' {
            match chars.next() {
                Some((_, 'n')) => value.push('\n'),
                Some((_, 't')) => value.push('\t'),
                Some((_, '0')) => value.push('\0'),
                Some((_, escaped)) => value.push(escaped),
                None => break,
            }
            continue;
        }
        value.push(c);
    }
    Err(ParseError::syntax(
        start,
        &input[start..],
        "unterminated quoted string",
    ))
}
