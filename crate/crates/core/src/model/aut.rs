//! Aldebaran AUT format.
//!
//! A file is a header `des (first, m, n)` followed by `m` lines of the form
//! `(src, "label", dst)`. Whitespace around commas and parentheses is
//! tolerated; quotes are optional for alphanumeric labels.

use crate::error::ModelError;
use crate::model::Lts;

fn parse_err(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Splits a parenthesized triple `( a , b , c )`, honouring quotes.
fn split_triple(line: &str, lineno: usize) -> Result<(String, String, String), ModelError> {
    let trimmed = line.trim();
    let inner = trimmed
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| parse_err(lineno, "expected a parenthesized triple"))?;
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    for c in inner.chars() {
        match c {
            '"' => {
                in_quotes = !in_quotes;
                current.push(c);
            }
            ',' if !in_quotes => {
                fields.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(c),
        }
    }
    if in_quotes {
        return Err(parse_err(lineno, "unterminated quote"));
    }
    fields.push(current.trim().to_string());
    if fields.len() != 3 {
        return Err(parse_err(
            lineno,
            format!("expected 3 fields, found {}", fields.len()),
        ));
    }
    Ok((fields[0].clone(), fields[1].clone(), fields[2].clone()))
}

fn parse_state(text: &str, lineno: usize) -> Result<u32, ModelError> {
    text.parse::<u32>()
        .map_err(|_| parse_err(lineno, format!("bad state index {text:?}")))
}

/// Parses AUT text into a validated [`Lts`].
pub fn parse_aut(text: &str) -> Result<Lts, ModelError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (lineno, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let lineno = lineno + 1;
    let rest = header
        .trim()
        .strip_prefix("des")
        .ok_or_else(|| parse_err(lineno, "header must start with `des`"))?;
    let (first, m, n) = split_triple(rest, lineno)?;
    let initial = parse_state(&first, lineno)?;
    let num_trans: usize = m
        .parse()
        .map_err(|_| parse_err(lineno, format!("bad transition count {m:?}")))?;
    let num_states = parse_state(&n, lineno)?;

    let mut transitions: Vec<(u32, String, u32)> = Vec::with_capacity(num_trans);
    let mut count = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let (src, label, dst) = split_triple(line, lineno)?;
        let src = parse_state(&src, lineno)?;
        let dst = parse_state(&dst, lineno)?;
        let label = label
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .unwrap_or(&label)
            .to_string();
        if label.is_empty() {
            return Err(parse_err(lineno, "empty action label"));
        }
        if src >= num_states || dst >= num_states {
            let bad = if src >= num_states { src } else { dst };
            return Err(parse_err(
                lineno,
                format!("state index {bad} out of range (model has {num_states} states)"),
            ));
        }
        transitions.push((src, label, dst));
        count += 1;
    }
    if count != num_trans {
        return Err(parse_err(
            1,
            format!("header declares {num_trans} transitions, found {count}"),
        ));
    }
    let borrowed: Vec<(u32, &str, u32)> = transitions
        .iter()
        .map(|(s, l, d)| (*s, l.as_str(), *d))
        .collect();
    Lts::new(num_states, initial, &borrowed)
}

/// Renders an [`Lts`] in AUT format; inverse of [`parse_aut`] on parsed models.
pub fn render_aut(lts: &Lts) -> String {
    let mut out = format!(
        "des ({},{},{})\n",
        lts.initial(),
        lts.num_transitions(),
        lts.num_states()
    );
    for (src, label, dst) in lts.transitions() {
        out.push_str(&format!("({},\"{}\",{})\n", src, label, dst));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_file() {
        let lts = parse_aut("des (0,3,4)\n(0,\"s\",1)\n(1,\"s\",2)\n(1,\"t\",3)\n").unwrap();
        assert_eq!(lts.num_states(), 4);
        assert_eq!(lts.initial(), 0);
        assert_eq!(lts.num_transitions(), 3);
        let labels: Vec<&str> = lts.alphabet().decl_labels().collect();
        assert_eq!(labels, ["s", "t"]);
    }

    #[test]
    fn parses_single_state_deadlock() {
        let lts = parse_aut("des (0,0,1)\n").unwrap();
        assert_eq!(lts.num_states(), 1);
        assert!(lts.alphabet().is_empty());
        assert!(lts.is_deadlock(0));
    }

    #[test]
    fn rejects_out_of_range_state() {
        let err = parse_aut("des (0,1,1)\n(0,\"a\",5)\n").unwrap_err();
        match err {
            ModelError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("state index 5 out of range"), "{msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_count_mismatch() {
        assert!(parse_aut("des (0,2,2)\n(0,\"a\",1)\n").is_err());
    }

    #[test]
    fn tolerates_whitespace_and_bare_labels() {
        let lts = parse_aut("des ( 0 , 2 , 2 )\n( 0 , a , 1 )\n(1, \"b\" ,0)\n").unwrap();
        assert_eq!(lts.num_transitions(), 2);
        assert_eq!(lts.alphabet().lex_index("a"), Some(0));
    }

    #[test]
    fn render_parse_round_trip() {
        let lts = parse_aut("des (0,4,4)\n(0,\"t\",1)\n(0,\"s\",1)\n(1,\"s\",2)\n(1,\"t\",3)\n")
            .unwrap();
        let rendered = render_aut(&lts);
        let reparsed = parse_aut(&rendered).unwrap();
        assert_eq!(lts, reparsed);
    }
}
