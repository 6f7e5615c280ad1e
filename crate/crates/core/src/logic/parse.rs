//! Concrete formula syntax.
//!
//! ```text
//! true                        truth constant (Boolean logics, depth 0)
//! false                       empty disjunction
//! 0.5  1/2                    rational constants (probabilistic logic)
//! phi | psi                   disjunction
//! phi & psi                   conjunction (bisimilarity only)
//! ~phi                        negation (bisimilarity only)
//! <a> phi                     diamond
//! <a|{a,b}> phi               decorated diamond (ready/failure trace)
//! *                           deadlock
//! ready{a,b}  fail{a}         ready-set / failure-set constants
//! 0.5*phi + 0.25*psi + 0.1    affine combination (probabilistic logic)
//! ```
//!
//! The pretty-printer inverts the parser on parser-produced formulae.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::LogicError;
use crate::logic::{uniform_depth, Formula, Vocabulary};
use crate::model::Alphabet;
use crate::rational::{parse_rational, render_rational};
use crate::semantics::SemanticsId;
use crate::value::ASet;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    /// `<act>` or `<act|{set}>`.
    Diamond(String, Option<Vec<String>>),
    Pipe,
    Amp,
    Tilde,
    Star,
    Plus,
    LBrace,
    RBrace,
    Comma,
    LParen,
    RParen,
}

fn syntax(pos: usize, msg: impl Into<String>) -> LogicError {
    LogicError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
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
        match c {
            '<' => {
                let end = text[i..]
                    .find('>')
                    .map(|off| i + off)
                    .ok_or_else(|| syntax(start, "unterminated `<`"))?;
                let inner = &text[i + 1..end];
                let (act, set) = match inner.split_once('|') {
                    None => (inner.trim().to_string(), None),
                    Some((act, set_part)) => {
                        let set_part = set_part.trim();
                        let body = set_part
                            .strip_prefix('{')
                            .and_then(|s| s.strip_suffix('}'))
                            .ok_or_else(|| {
                                syntax(start, "decoration must be a braced action set")
                            })?;
                        let labels: Vec<String> = if body.trim().is_empty() {
                            Vec::new()
                        } else {
                            body.split(',').map(|l| l.trim().to_string()).collect()
                        };
                        (act.trim().to_string(), Some(labels))
                    }
                };
                if act.is_empty() {
                    return Err(syntax(start, "empty action in diamond"));
                }
                out.push((start, Tok::Diamond(act, set)));
                i = end + 1;
            }
            '|' => {
                out.push((start, Tok::Pipe));
                i += 1;
            }
            '&' => {
                out.push((start, Tok::Amp));
                i += 1;
            }
            '~' => {
                out.push((start, Tok::Tilde));
                i += 1;
            }
            '*' => {
                out.push((start, Tok::Star));
                i += 1;
            }
            '+' => {
                out.push((start, Tok::Plus));
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
            '(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((start, Tok::RParen));
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
                while i < bytes.len()
                    && ((bytes[i] as char).is_alphanumeric() || bytes[i] == b'_')
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

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vocab: &'a Vocabulary,
}

impl<'a> Parser<'a> {
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

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LogicError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(pos, format!("expected {what}"))),
        }
    }

    fn action(&self, label: &str, _pos: usize) -> Result<u16, LogicError> {
        self.vocab
            .alphabet()
            .lex_index(label)
            .ok_or_else(|| LogicError::UnknownAction {
                label: label.to_string(),
            })
    }

    fn action_set(&mut self) -> Result<ASet, LogicError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut set = ASet::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.bump();
            return Ok(set);
        }
        loop {
            let pos = self.here();
            match self.bump() {
                Some(Tok::Ident(l)) | Some(Tok::Num(l)) => {
                    set.insert(self.action(&l, pos)?);
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

    fn labels_to_set(&self, labels: &[String], pos: usize) -> Result<ASet, LogicError> {
        labels.iter().map(|l| self.action(l, pos)).collect()
    }

    // Boolean grammar -------------------------------------------------------

    fn disj(&mut self) -> Result<Formula, LogicError> {
        let first = self.conj()?;
        let mut args = vec![first];
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            args.push(self.conj()?);
        }
        Ok(if args.len() == 1 {
            args.pop().unwrap()
        } else {
            Formula::Disj(args)
        })
    }

    fn conj(&mut self) -> Result<Formula, LogicError> {
        let first = self.unary()?;
        let mut args = vec![first];
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            args.push(self.unary()?);
        }
        Ok(if args.len() == 1 {
            args.pop().unwrap()
        } else {
            Formula::Conj(args)
        })
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        let pos = self.here();
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Formula::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Diamond(..)) => {
                let (act, set) = match self.bump() {
                    Some(Tok::Diamond(a, s)) => (a, s),
                    _ => unreachable!(),
                };
                let a = self.action(&act, pos)?;
                let inner = Box::new(self.unary()?);
                match set {
                    None => Ok(Formula::Diamond(a, inner)),
                    Some(labels) => Ok(Formula::DecDiamond(
                        self.labels_to_set(&labels, pos)?,
                        a,
                        inner,
                    )),
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, LogicError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Ident(id)) if id == "true" => Ok(Formula::Top),
            Some(Tok::Ident(id)) if id == "false" => Ok(Formula::Disj(Vec::new())),
            Some(Tok::Ident(id)) if id == "ready" => Ok(Formula::ReadyConst(self.action_set()?)),
            Some(Tok::Ident(id)) if id == "fail" => Ok(Formula::FailConst(self.action_set()?)),
            Some(Tok::Star) => Ok(Formula::Star),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Num(n)) => Err(syntax(
                pos,
                format!("rational constant {n:?} in a Boolean logic"),
            )),
            other => Err(syntax(pos, format!("unexpected token {other:?}"))),
        }
    }

    // Probabilistic grammar --------------------------------------------------

    fn number(&mut self) -> Result<BigRational, LogicError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => parse_rational(&n).map_err(|msg| syntax(pos, msg)),
            other => Err(syntax(pos, format!("expected a rational, got {other:?}"))),
        }
    }

    fn prob_sum(&mut self) -> Result<Formula, LogicError> {
        #[derive(Debug)]
        enum Term {
            Scaled(BigRational, Formula),
            Plain(Formula),
            Offset(BigRational),
        }
        let mut terms = Vec::new();
        loop {
            let term = if matches!(self.peek(), Some(Tok::Num(_))) {
                let coeff = self.number()?;
                if self.peek() == Some(&Tok::Star) {
                    self.bump();
                    Term::Scaled(coeff, self.prob_unary()?)
                } else {
                    Term::Offset(coeff)
                }
            } else {
                Term::Plain(self.prob_unary()?)
            };
            terms.push(term);
            if self.peek() == Some(&Tok::Plus) {
                self.bump();
            } else {
                break;
            }
        }
        if terms.len() == 1 {
            match terms.pop().unwrap() {
                Term::Plain(f) => return Ok(f),
                Term::Offset(c) => return Ok(Formula::Const(c)),
                Term::Scaled(p, f) => {
                    return Ok(Formula::Affine {
                        terms: vec![(p, f)],
                        offset: BigRational::zero(),
                    })
                }
            }
        }
        let mut affine_terms = Vec::new();
        let mut offset = BigRational::zero();
        for t in terms {
            match t {
                Term::Scaled(p, f) => affine_terms.push((p, f)),
                Term::Plain(f) => affine_terms.push((BigRational::from_integer(1.into()), f)),
                Term::Offset(c) => offset += c,
            }
        }
        Ok(Formula::Affine {
            terms: affine_terms,
            offset,
        })
    }

    fn prob_unary(&mut self) -> Result<Formula, LogicError> {
        let pos = self.here();
        match self.peek() {
            Some(Tok::Diamond(..)) => {
                let (act, set) = match self.bump() {
                    Some(Tok::Diamond(a, s)) => (a, s),
                    _ => unreachable!(),
                };
                if set.is_some() {
                    return Err(syntax(pos, "decorated diamond in the probabilistic logic"));
                }
                let a = self.action(&act, pos)?;
                Ok(Formula::Diamond(a, Box::new(self.prob_unary()?)))
            }
            Some(Tok::Num(_)) => Ok(Formula::Const(self.number()?)),
            Some(Tok::LParen) => {
                self.bump();
                let f = self.prob_sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            other => Err(syntax(pos, format!("unexpected token {other:?}"))),
        }
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        if self.vocab.semantics() == SemanticsId::ProbabilisticTrace {
            self.prob_sum()
        } else {
            self.disj()
        }
    }
}

/// Parses a formula and checks vocabulary admission and uniform depth.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, LogicError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vocab,
    };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.here(), "trailing input"));
    }
    vocab.check(&f)?;
    uniform_depth(&f, vocab.alphabet())?;
    Ok(f)
}

/// Strips single-argument disjunction/conjunction wrappers, which render as
/// their argument.
fn effective(f: &Formula) -> &Formula {
    match f {
        Formula::Disj(args) | Formula::Conj(args) if args.len() == 1 => effective(&args[0]),
        other => other,
    }
}

fn needs_parens_under_unary(f: &Formula) -> bool {
    let f = effective(f);
    matches!(
        f,
        Formula::Disj(args) if args.len() > 1
    ) || matches!(f, Formula::Conj(args) if args.len() > 1)
        || matches!(f, Formula::Affine { .. })
}

/// Renders a formula in the concrete syntax.
pub fn render_formula(f: &Formula, alphabet: &Alphabet) -> String {
    fn set(alphabet: &Alphabet, s: &ASet) -> String {
        let labels: Vec<&str> = s.iter().map(|&a| alphabet.label(a)).collect();
        format!("{{{}}}", labels.join(","))
    }
    fn unary_arg(alphabet: &Alphabet, f: &Formula) -> String {
        if needs_parens_under_unary(f) {
            format!("({})", render_formula(f, alphabet))
        } else {
            render_formula(f, alphabet)
        }
    }
    match f {
        Formula::Top => "true".to_string(),
        Formula::Const(c) => render_rational(c),
        Formula::Disj(args) if args.is_empty() => "false".to_string(),
        Formula::Disj(args) if args.len() == 1 => render_formula(&args[0], alphabet),
        Formula::Disj(args) => args
            .iter()
            .map(|a| render_formula(a, alphabet))
            .collect::<Vec<_>>()
            .join(" | "),
        Formula::Conj(args) if args.len() == 1 => render_formula(&args[0], alphabet),
        Formula::Conj(args) => args
            .iter()
            .map(|a| {
                if matches!(effective(a), Formula::Disj(d) if d.len() > 1) {
                    format!("({})", render_formula(a, alphabet))
                } else {
                    render_formula(a, alphabet)
                }
            })
            .collect::<Vec<_>>()
            .join(" & "),
        Formula::Neg(inner) => format!("~{}", unary_arg(alphabet, inner)),
        Formula::Affine { terms, offset } => {
            let mut parts: Vec<String> = terms
                .iter()
                .map(|(p, a)| format!("{}*{}", render_rational(p), unary_arg(alphabet, a)))
                .collect();
            if parts.is_empty() || !offset.is_zero() {
                parts.push(render_rational(offset));
            }
            parts.join(" + ")
        }
        Formula::Diamond(a, inner) => {
            format!("<{}> {}", alphabet.label(*a), unary_arg(alphabet, inner))
        }
        Formula::DecDiamond(s, a, inner) => format!(
            "<{}|{}> {}",
            alphabet.label(*a),
            set(alphabet, s),
            unary_arg(alphabet, inner)
        ),
        Formula::Star => "*".to_string(),
        Formula::ReadyConst(s) => format!("ready{}", set(alphabet, s)),
        Formula::FailConst(s) => format!("fail{}", set(alphabet, s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::logic::random_formula;
    use crate::model::SplitMix;

    fn vocab(sem: SemanticsId) -> Vocabulary {
        Vocabulary::new(sem, fixtures::g1g2().alphabet()).unwrap()
    }

    #[test]
    fn parses_diamond_chain() {
        let v = vocab(SemanticsId::Trace);
        let f = parse_formula("<s><t>true", &v).unwrap();
        assert_eq!(
            f,
            Formula::Diamond(0, Box::new(Formula::Diamond(1, Box::new(Formula::Top))))
        );
    }

    #[test]
    fn rejects_conjunction_under_trace() {
        let v = vocab(SemanticsId::Trace);
        match parse_formula("<s>(<s>true & <t>true)", &v).unwrap_err() {
            LogicError::Vocabulary { op, .. } => assert_eq!(op, "conjunction"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_top_level_constant_in_depth_one_formula() {
        let v = vocab(SemanticsId::Trace);
        assert!(matches!(
            parse_formula("<s>true | true", &v),
            Err(LogicError::IllFormed { .. })
        ));
    }

    #[test]
    fn parses_decorated_diamond_and_constants() {
        let v = vocab(SemanticsId::ReadyTrace);
        let f = parse_formula("<s|{s,t}> *", &v).unwrap();
        match f {
            Formula::DecDiamond(set, 0, inner) => {
                assert_eq!(set.len(), 2);
                assert_eq!(*inner, Formula::Star);
            }
            other => panic!("unexpected formula {other:?}"),
        }
        let v = vocab(SemanticsId::Readiness);
        assert!(parse_formula("<s> ready{s,t}", &v).is_ok());
        assert!(parse_formula("ready{s} & ready{t}", &v).is_err());
    }

    #[test]
    fn parses_affine_combinations() {
        let p1: crate::model::Gps = fixtures::p1();
        let v = Vocabulary::new(SemanticsId::ProbabilisticTrace, p1.alphabet()).unwrap();
        let f = parse_formula("1/2*<a>1 + 1/4*<b>1 + 1/8", &v).unwrap();
        match &f {
            Formula::Affine { terms, offset } => {
                assert_eq!(terms.len(), 2);
                assert_eq!(render_rational(offset), "1/8");
            }
            other => panic!("unexpected formula {other:?}"),
        }
        // exceeding mass 1 is a vocabulary violation
        assert!(parse_formula("3/4*1 + 3/4*1", &v).is_err());
    }

    #[test]
    fn unknown_action_is_reported() {
        let v = vocab(SemanticsId::Trace);
        assert!(matches!(
            parse_formula("<zz>true", &v),
            Err(LogicError::UnknownAction { .. })
        ));
    }

    #[test]
    fn printer_is_a_fixpoint_inverse_of_the_parser() {
        let mut rng = SplitMix::new(23);
        let p1 = fixtures::p1();
        for sem in SemanticsId::ALL {
            if !sem.has_vocabulary() {
                continue;
            }
            let v = if sem == SemanticsId::ProbabilisticTrace {
                Vocabulary::new(sem, p1.alphabet()).unwrap()
            } else {
                vocab(sem)
            };
            for depth in 0..4 {
                for _ in 0..40 {
                    let f = random_formula(&v, depth, &mut rng);
                    let printed = render_formula(&f, v.alphabet());
                    let reparsed = parse_formula(&printed, &v)
                        .unwrap_or_else(|e| panic!("{printed:?}: {e}"));
                    assert_eq!(
                        render_formula(&reparsed, v.alphabet()),
                        printed,
                        "printer not stable on {f:?}"
                    );
                }
            }
        }
    }
}
