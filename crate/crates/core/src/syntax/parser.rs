//! Recursive descent parser for the ASCII formula grammar.
//!
//! ```text
//! formula  := conj ( "\/" conj )*
//! conj     := unary ( "/\" unary )*
//! unary    := ("E" | "A") var "." formula | primary
//! primary  := "(" formula ")" | "T" | "F" | "!"? REL "(" terms ")"
//!           | term ("=" | "!=") term | atom | "poss(" formula ")"
//!           | "restrict(" formula ";" formula ")"
//! ```

use super::{is_first_order, AtomCall, Formula, Term, Var};
use crate::atoms::{AtomRegistry, AtomShape};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown atom `{name}` at position {position}")]
    UnknownAtom { position: usize, name: String },
    #[error("bad arguments for `{name}` at position {position}: {message}")]
    Arity { position: usize, name: String, message: String },
    #[error("second argument of restrict at position {position} is not first-order")]
    NotFirstOrder { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownAtom { position, .. }
            | ParseError::Arity { position, .. }
            | ParseError::NotFirstOrder { position } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    Comma,
    Semi,
    Bar,
    Dot,
    Eq,
    Neq,
    Bang,
    Or,
    And,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Or => f.write_str("`\\/`"),
            Tok::And => f.write_str("`/\\`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b';' => Tok::Semi,
            b'|' => Tok::Bar,
            b'.' => Tok::Dot,
            b'=' => Tok::Eq,
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Neq
            }
            b'!' => Tok::Bang,
            b'\\' if bytes.get(i + 1) == Some(&b'/') => {
                i += 1;
                Tok::Or
            }
            b'/' if bytes.get(i + 1) == Some(&b'\\') => {
                i += 1;
                Tok::And
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..=i].parse().map_err(|_| ParseError::Syntax {
                    position: start,
                    message: "number too large".into(),
                })?;
                Tok::Num(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                return Err(ParseError::Syntax {
                    position: start,
                    message: format!("unexpected character `{}`", text[start..].chars().next().unwrap_or('?')),
                })
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Formula parser configured with the atom registry (for names and arities)
/// and the set of constant symbols declared by the model.
pub struct Parser<'r> {
    registry: &'r AtomRegistry,
    constants: BTreeSet<String>,
    allow_reserved: bool,
}

/// Parses with the built-in atom catalog and no declared constants.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    Parser::new(AtomRegistry::builtin_ref()).parse(text)
}

impl<'r> Parser<'r> {
    pub fn new(registry: &'r AtomRegistry) -> Self {
        Parser { registry, constants: BTreeSet::new(), allow_reserved: false }
    }

    pub fn with_constants(mut self, constants: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.constants = constants.into_iter().map(Into::into).collect();
        self
    }

    /// Accept identifiers in the reserved `_` namespace, as produced by the
    /// translator.
    pub fn allow_reserved(mut self, yes: bool) -> Self {
        self.allow_reserved = yes;
        self
    }

    pub fn parse(&self, text: &str) -> Result<Formula, ParseError> {
        let tokens = lex(text)?;
        let mut st = State { toks: &tokens, pos: 0, cfg: self };
        let f = st.formula()?;
        match st.peek() {
            Tok::End => Ok(f),
            t => Err(st.err(format!("unexpected {t} after formula"))),
        }
    }
}

struct State<'a, 'r> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    cfg: &'a Parser<'r>,
}

impl State<'_, '_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: String) -> ParseError {
        ParseError::Syntax { position: self.offset(), message }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Ident(q) = self.peek() {
            if (q == "E" || q == "A") && matches!(self.peek_at(1), Tok::Ident(_)) {
                let exists = q == "E";
                self.bump();
                let v = self.variable()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                return Ok(if exists { Formula::exists(v, body) } else { Formula::forall(v, body) });
            }
        }
        self.primary()
    }

    fn variable(&mut self) -> Result<Var, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Ident(name) => {
                if self.cfg.constants.contains(&name) {
                    return Err(ParseError::Syntax { position: at, message: format!("`{name}` is a constant, expected a variable") });
                }
                self.check_reserved(&name, at)?;
                Ok(Var::new(name))
            }
            t => Err(ParseError::Syntax { position: at, message: format!("expected a variable, found {t}") }),
        }
    }

    fn check_reserved(&self, name: &str, at: usize) -> Result<(), ParseError> {
        if name.starts_with(super::RESERVED_PREFIX) && !self.cfg.allow_reserved {
            return Err(ParseError::Syntax { position: at, message: format!("identifier `{name}` uses the reserved `_` prefix") });
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Ident(name) => {
                if self.cfg.constants.contains(&name) {
                    Ok(Term::Const(name))
                } else {
                    self.check_reserved(&name, at)?;
                    Ok(Term::Var(Var::new(name)))
                }
            }
            t => Err(ParseError::Syntax { position: at, message: format!("expected a term, found {t}") }),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Bang => {
                self.bump();
                let name = match self.bump() {
                    Tok::Ident(n) => n,
                    t => return Err(ParseError::Syntax { position: at + 1, message: format!("expected a relation after `!`, found {t}") }),
                };
                if self.cfg.registry.get(&name).is_some() {
                    return Err(ParseError::Syntax {
                        position: at,
                        message: format!("dependency atom `{name}` cannot be negated; use its dual atom"),
                    });
                }
                let args = self.term_list()?;
                Ok(Formula::Rel { positive: false, name, args })
            }
            Tok::Ident(name) => {
                let next = self.peek_at(1).clone();
                if matches!(next, Tok::Eq | Tok::Neq) {
                    let left = self.term()?;
                    let positive = self.bump() == Tok::Eq;
                    let right = self.term()?;
                    return Ok(Formula::Eq { positive, left, right });
                }
                match (name.as_str(), &next) {
                    ("T", t) if *t != Tok::LParen => {
                        self.bump();
                        return Ok(Formula::Top);
                    }
                    ("F", t) if *t != Tok::LParen => {
                        self.bump();
                        return Ok(Formula::Bottom);
                    }
                    ("poss", Tok::LParen) => {
                        self.bump();
                        self.bump();
                        let body = self.formula()?;
                        self.expect(Tok::RParen)?;
                        return Ok(Formula::possibly(body));
                    }
                    ("restrict", Tok::LParen) => {
                        self.bump();
                        self.bump();
                        let body = self.formula()?;
                        self.expect(Tok::Semi)?;
                        let theta_at = self.offset();
                        let theta = self.formula()?;
                        self.expect(Tok::RParen)?;
                        if !is_first_order(&theta) {
                            return Err(ParseError::NotFirstOrder { position: theta_at });
                        }
                        return Ok(Formula::restricted_by(body, theta));
                    }
                    _ => {}
                }
                if let Some(def) = self.cfg.registry.get(&name) {
                    let shape = def.shape.clone();
                    self.bump();
                    return self.atom(name, &shape, at);
                }
                if next == Tok::LParen {
                    if name.starts_with(|c: char| c.is_ascii_lowercase()) {
                        return Err(ParseError::UnknownAtom { position: at, name });
                    }
                    if name.starts_with(super::RESERVED_PREFIX) && !self.cfg.allow_reserved {
                        self.check_reserved(&name, at)?;
                    }
                    self.bump();
                    let args = self.term_list()?;
                    return Ok(Formula::Rel { positive: true, name, args });
                }
                Err(ParseError::Syntax { position: at, message: format!("expected a formula, found `{name}`") })
            }
            t => Err(self.err(format!("expected a formula, found {t}"))),
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn var_group(&mut self) -> Result<Vec<Var>, ParseError> {
        let mut out = Vec::new();
        if matches!(self.peek(), Tok::Ident(_)) {
            out.push(self.variable()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                out.push(self.variable()?);
            }
        }
        Ok(out)
    }

    fn atom(&mut self, name: String, shape: &AtomShape, at: usize) -> Result<Formula, ParseError> {
        let arity_err = |message: String| ParseError::Arity { position: at, name: name.clone(), message };
        if *self.peek() != Tok::LParen {
            let call = AtomCall::new(name.clone(), vec![]);
            shape.validate(&call).map_err(arity_err)?;
            return Ok(Formula::Dep(call));
        }
        self.bump();
        let mut param = None;
        if shape.param {
            match self.bump() {
                Tok::Num(n) => param = Some(n),
                t => return Err(arity_err(format!("expected a numeric parameter, found {t}"))),
            }
            if *self.peek() != Tok::RParen {
                self.expect(Tok::Semi)?;
            }
        }
        let mut groups = vec![self.var_group()?];
        while let Tok::Semi | Tok::Bar = self.peek() {
            let sep = self.bump();
            let expected = if groups.len() == 2 { Tok::Bar } else { Tok::Semi };
            if sep != expected {
                return Err(arity_err(format!("expected {expected} before argument group {}", groups.len() + 1)));
            }
            groups.push(self.var_group()?);
        }
        self.expect(Tok::RParen)?;
        if shape.groups == 0 && groups.len() == 1 && groups[0].is_empty() {
            groups.clear();
        }
        let call = AtomCall { name: name.clone(), param, groups };
        shape.validate(&call).map_err(arity_err)?;
        Ok(Formula::Dep(call))
    }
}
