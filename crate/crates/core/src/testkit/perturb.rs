//! Answer-text variants for exact-match grading: cosmetic perturbations that
//! must still be accepted, and near misses that must not.

use rand::seq::IndexedRandom;
use rand::Rng;

/// Splits `text` into (is_quoted, piece) runs. Quoted runs include their
/// delimiters; doubled quotes and backslash escapes stay inside the run.
fn segments(text: &str) -> Vec<(bool, String)> {
    let mut out: Vec<(bool, String)> = Vec::new();
    let mut chars = text.chars().peekable();
    let mut plain = String::new();
    while let Some(c) = chars.next() {
        if c != '\'' && c != '"' {
            plain.push(c);
            continue;
        }
        if !plain.is_empty() {
            out.push((false, std::mem::take(&mut plain)));
        }
        let mut q = String::from(c);
        while let Some(inner) = chars.next() {
            q.push(inner);
            if inner == '\\' {
                if let Some(e) = chars.next() {
                    q.push(e);
                }
                continue;
            }
            if inner == c {
                if chars.peek() == Some(&c) {
                    q.push(chars.next().unwrap());
                    continue;
                }
                break;
            }
        }
        out.push((true, q));
    }
    if !plain.is_empty() {
        out.push((false, plain));
    }
    out
}

/// Returns a variant of `text` differing only in letter case outside quoted
/// literals, the width and kind of existing whitespace, surrounding
/// whitespace and trailing semicolons.
pub fn perturb<R: Rng + ?Sized>(text: &str, rng: &mut R) -> String {
    const WS: &[&str] = &[" ", "  ", "\t", "\n", " \n  ", "\r\n"];
    let mut out = String::new();
    if rng.random_bool(0.3) {
        out.push_str(WS.choose(rng).unwrap());
    }
    for (quoted, piece) in segments(text.trim()) {
        if quoted {
            out.push_str(&piece);
            continue;
        }
        let mut in_ws = false;
        for c in piece.chars() {
            if c.is_whitespace() {
                if !in_ws {
                    out.push_str(WS.choose(rng).unwrap());
                }
                in_ws = true;
                continue;
            }
            in_ws = false;
            if rng.random_bool(0.5) {
                out.extend(c.to_uppercase());
            } else {
                out.extend(c.to_lowercase());
            }
        }
    }
    for _ in 0..rng.random_range(0..=2) {
        if rng.random_bool(0.5) {
            out.push(' ');
        }
        out.push(';');
    }
    if rng.random_bool(0.3) {
        out.push_str(WS.choose(rng).unwrap());
    }
    out
}

/// Returns a variant of `text` that changes its meaning: a literal's case or
/// content, a dropped token, or a changed number. `None` if no edit applies.
pub fn near_miss<R: Rng + ?Sized>(text: &str, rng: &mut R) -> Option<String> {
    let segs = segments(text.trim());
    let mut edits: Vec<Box<dyn Fn() -> Option<String>>> = Vec::new();
    for (i, (quoted, piece)) in segs.iter().enumerate() {
        let rebuild = {
            let segs = segs.clone();
            move |i: usize, new: String| -> String {
                segs.iter()
                    .enumerate()
                    .map(|(j, (_, p))| if j == i { new.clone() } else { p.clone() })
                    .collect()
            }
        };
        if *quoted {
            let p = piece.clone();
            let r = rebuild.clone();
            edits.push(Box::new(move || {
                let body = &p[1..p.len().saturating_sub(1)];
                let flipped: String = body
                    .chars()
                    .map(|c| {
                        if c.is_lowercase() {
                            c.to_ascii_uppercase()
                        } else {
                            c.to_ascii_lowercase()
                        }
                    })
                    .collect();
                (flipped != body).then(|| {
                    let q = &p[..1];
                    r(i, format!("{q}{flipped}{q}"))
                })
            }));
            let p = piece.clone();
            edits.push(Box::new(move || {
                let q = &p[..1];
                Some(rebuild(
                    i,
                    format!("{q}{}x{q}", &p[1..p.len().saturating_sub(1)]),
                ))
            }));
        } else {
            let p = piece.clone();
            let r = rebuild.clone();
            edits.push(Box::new(move || {
                let pos = p.find(|c: char| c.is_ascii_digit())?;
                let mut s = p.clone();
                let d = s.as_bytes()[pos] - b'0';
                s.replace_range(pos..pos + 1, &((d + 1) % 10).to_string());
                Some(r(i, s))
            }));
            let p = piece.clone();
            edits.push(Box::new(move || {
                let words: Vec<&str> = p.split_whitespace().collect();
                if words.len() < 2 {
                    return None;
                }
                let drop = words.len() / 2;
                let kept: Vec<&str> = words
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != drop)
                    .map(|(_, w)| *w)
                    .collect();
                let lead = if p.starts_with(char::is_whitespace) {
                    " "
                } else {
                    ""
                };
                let trail = if p.ends_with(char::is_whitespace) {
                    " "
                } else {
                    ""
                };
                Some(rebuild(i, format!("{lead}{}{trail}", kept.join(" "))))
            }));
        }
    }
    let mut order: Vec<usize> = (0..edits.len()).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    order.into_iter().find_map(|k| edits[k]())
}
