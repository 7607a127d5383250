/// Canonical text form for exact-match grading.
///
/// Outer whitespace and trailing semicolons are removed, whitespace runs
/// outside quoted literals collapse to a single space, and everything
/// outside quoted literals is lower-cased. Quoted literals ('...' and "...")
/// are copied verbatim. The function is idempotent.
pub fn normalize(text: &str) -> String {
    let mut body = text.trim();
    while let Some(rest) = body.strip_suffix(';') {
        body = rest.trim_end();
    }

    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars().peekable();
    let mut pending_space = false;

    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        if c == '\'' || c == '"' {
            out.push(c);
            while let Some(inner) = chars.next() {
                out.push(inner);
                if inner == '\\' {
                    if let Some(escaped) = chars.next() {
                        out.push(escaped);
                    }
                    continue;
                }
                if inner == c {
                    // doubled quote continues the literal
                    if chars.peek() == Some(&c) {
                        out.push(chars.next().expect("peeked"));
                        continue;
                    }
                    break;
                }
            }
            continue;
        }
        out.extend(c.to_lowercase());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapses_and_folds() {
        assert_eq!(
            normalize("  drop   TABLE tbl_jobs ;"),
            "drop table tbl_jobs"
        );
    }

    #[test]
    fn literal_case_preserved() {
        assert_eq!(normalize("SELECT 'Ab'"), "select 'Ab'");
        assert_eq!(
            normalize("SELECT \"A  B\"  FROM T"),
            "select \"A  B\" from t"
        );
        assert_eq!(normalize("WHERE x = 'it''s OK'"), "where x = 'it''s OK'");
    }

    #[test]
    fn idempotent_on_awkward_inputs() {
        for s in [
            "x;;",
            "a ; ;",
            "'unterminated  LIT",
            "SELECT 'a\\'B'  ;",
            "\tINSERT\nINTO t VALUES ('X')",
            "",
            ";",
        ] {
            let once = normalize(s);
            assert_eq!(normalize(&once), once, "{s:?}");
        }
    }
}
