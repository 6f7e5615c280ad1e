//! Concrete term syntax.
//!
//! ```text
//! x                      variable
//! a(x + y)               action applied to a join
//! <{a,b},a>(x)           decorated action
//! *                      deadlock constant
//! {a,b}                  ready/failure-set constant
//! 0                      empty join
//! x (+) 1/2 (+) y        binary convex combination with weight 1/2 on x
//! ```
//!
//! An identifier followed by `(` is an action application; a bare identifier
//! is a variable. Convex combinations associate to the left.

use num_rational::BigRational;
use num_traits::One;

use crate::error::TheoryError;
use crate::rational::{parse_rational, render_rational};
use crate::theory::TheoryTerm;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    ConvexOp,
    Plus,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Lt,
    Gt,
}

fn syntax(pos: usize, msg: impl Into<String>) -> TheoryError {
    TheoryError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, TheoryError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if text[i..].starts_with("(+)") {
            out.push((start, Tok::ConvexOp));
            i += 3;
            continue;
        }
        match c {
            '+' => {
                out.push((start, Tok::Plus));
                i += 1;
            }
            '*' => {
                out.push((start, Tok::Star));
                i += 1;
            }
            '(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            '{' => {
                out.push((start, Tok::LBrace));
                i += 1;
            }
            '}' => {
                out.push((start, Tok::RBrace));
                i += 1;
            }
            ',' => {
                out.push((start, Tok::Comma));
                i += 1;
            }
            '<' => {
                out.push((start, Tok::Lt));
                i += 1;
            }
            '>' => {
                out.push((start, Tok::Gt));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'/')
                {
                    i += 1;
                }
                out.push((start, Tok::Num(text[start..i].to_string())));
            }
            c if c.is_alphanumeric() || c == '_' => {
                while i < bytes.len() && ((bytes[i] as char).is_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => return Err(syntax(start, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(usize::MAX)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), TheoryError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(pos, format!("expected {what}"))),
        }
    }

    fn label_set(&mut self) -> Result<std::collections::BTreeSet<String>, TheoryError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut set = std::collections::BTreeSet::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.bump();
            return Ok(set);
        }
        loop {
            let pos = self.here();
            match self.bump() {
                Some(Tok::Ident(l)) | Some(Tok::Num(l)) => {
                    set.insert(l);
                }
                _ => return Err(syntax(pos, "expected an action label")),
            }
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => break,
                _ => return Err(syntax(pos, "expected `,` or `}`")),
            }
        }
        Ok(set)
    }

    fn term(&mut self) -> Result<TheoryTerm, TheoryError> {
        let mut acc = self.join()?;
        while self.peek() == Some(&Tok::ConvexOp) {
            self.bump();
            let weight = match self.bump() {
                Some(Tok::Num(n)) => {
                    parse_rational(&n).map_err(|msg| syntax(self.here(), msg))?
                }
                _ => return Err(syntax(self.here(), "expected a weight after `(+)`")),
            };
            self.expect(Tok::ConvexOp, "`(+)` after the weight")?;
            let rhs = self.join()?;
            let complement = BigRational::one() - &weight;
            acc = TheoryTerm::Convex(vec![(weight, acc), (complement, rhs)]);
        }
        Ok(acc)
    }

    fn join(&mut self) -> Result<TheoryTerm, TheoryError> {
        let first = self.prefix()?;
        let mut parts = vec![first];
        while self.peek() == Some(&Tok::Plus) {
            self.bump();
            parts.push(self.prefix()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            TheoryTerm::Join(parts)
        })
    }

    fn prefix(&mut self) -> Result<TheoryTerm, TheoryError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Ident(id)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.bump();
                    let inner = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(TheoryTerm::Act(id, Box::new(inner)))
                } else {
                    Ok(TheoryTerm::Var(id))
                }
            }
            Some(Tok::Lt) => {
                let set = self.label_set()?;
                self.expect(Tok::Comma, "`,`")?;
                let act = match self.bump() {
                    Some(Tok::Ident(a)) | Some(Tok::Num(a)) => a,
                    _ => return Err(syntax(pos, "expected an action label")),
                };
                self.expect(Tok::Gt, "`>`")?;
                self.expect(Tok::LParen, "`(`")?;
                let inner = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(TheoryTerm::DecAct(set, act, Box::new(inner)))
            }
            Some(Tok::Star) => Ok(TheoryTerm::Star),
            Some(Tok::LBrace) => {
                // re-lex the brace as a set constant
                self.pos -= 1;
                Ok(TheoryTerm::SetConst(self.label_set()?))
            }
            Some(Tok::Num(n)) if n == "0" => Ok(TheoryTerm::Join(Vec::new())),
            Some(Tok::LParen) => {
                let inner = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(syntax(pos, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a term in the concrete syntax.
pub fn parse_term(text: &str) -> Result<TheoryTerm, TheoryError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.term()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.here(), "trailing input"));
    }
    Ok(t)
}

/// Renders a term. Binary convex combinations use the `(+) p (+)` form;
/// combinations of other arities render with explicit weights.
pub fn render_term(t: &TheoryTerm) -> String {
    fn parens_in_join(t: &TheoryTerm) -> bool {
        matches!(t, TheoryTerm::Convex(_) | TheoryTerm::Join(_))
    }
    match t {
        TheoryTerm::Var(v) => v.clone(),
        TheoryTerm::Join(parts) if parts.is_empty() => "0".to_string(),
        TheoryTerm::Join(parts) => parts
            .iter()
            .map(|p| {
                if parens_in_join(p) {
                    format!("({})", render_term(p))
                } else {
                    render_term(p)
                }
            })
            .collect::<Vec<_>>()
            .join(" + "),
        TheoryTerm::Convex(parts) => {
            if parts.len() == 2 && (&parts[0].0 + &parts[1].0).is_one() {
                format!(
                    "{} (+) {} (+) {}",
                    render_term(&parts[0].1),
                    render_rational(&parts[0].0),
                    render_term(&parts[1].1)
                )
            } else {
                let body = parts
                    .iter()
                    .map(|(p, t)| format!("{}: {}", render_rational(p), render_term(t)))
                    .collect::<Vec<_>>()
                    .join(", ");
                format!("conv[{body}]")
            }
        }
        TheoryTerm::Act(a, inner) => format!("{a}({})", render_term(inner)),
        TheoryTerm::DecAct(set, a, inner) => {
            let labels: Vec<&str> = set.iter().map(|s| s.as_str()).collect();
            format!("<{{{}}},{a}>({})", labels.join(","), render_term(inner))
        }
        TheoryTerm::Star => "*".to_string(),
        TheoryTerm::SetConst(set) => {
            let labels: Vec<&str> = set.iter().map(|s| s.as_str()).collect();
            format!("{{{}}}", labels.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::SemanticsId;
    use crate::theory::{check_equation, normalize};

    #[test]
    fn parses_action_over_join() {
        let t = parse_term("a(x + y)").unwrap();
        let n = normalize(SemanticsId::Trace, &t).unwrap();
        match n.nf {
            crate::theory::NormalForm::Trace { entries } => assert_eq!(entries.len(), 2),
            other => panic!("unexpected nf {other:?}"),
        }
    }

    #[test]
    fn parses_decorated_action_and_constants() {
        let t = parse_term("<{a,b},a>(x) + *").unwrap();
        assert!(normalize(SemanticsId::ReadyTrace, &t).is_ok());
        let c = parse_term("{a,b}").unwrap();
        assert_eq!(
            c,
            TheoryTerm::SetConst(["a".to_string(), "b".to_string()].into_iter().collect())
        );
    }

    #[test]
    fn parses_convex_combination() {
        let lhs = parse_term("x (+) 1/2 (+) x").unwrap();
        let rhs = parse_term("x").unwrap();
        assert!(check_equation(SemanticsId::ProbabilisticTrace, &lhs, &rhs).unwrap());
    }

    #[test]
    fn empty_join_is_zero() {
        let t = parse_term("a(0)").unwrap();
        let n = normalize(SemanticsId::Trace, &t).unwrap();
        match n.nf {
            crate::theory::NormalForm::Trace { entries } => assert!(entries.is_empty()),
            other => panic!("unexpected nf {other:?}"),
        }
    }

    #[test]
    fn round_trips_through_render() {
        for text in ["a(x + y)", "<{a,b},a>(x)", "x (+) 1/2 (+) y", "0", "{a} + *"] {
            let t = parse_term(text).unwrap();
            let printed = render_term(&t);
            let reparsed = parse_term(&printed).unwrap();
            assert_eq!(t, reparsed, "{text} -> {printed}");
        }
    }
}
