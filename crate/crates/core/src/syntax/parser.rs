//! Recursive-descent parser for the ASCII formula language.
//!
//! ```text
//! formula := sum
//! sum     := prod (('+' | '-') prod)*
//! prod    := rational '*' lattice | lattice
//! lattice := unary (('/\' | '\/') unary)*
//! unary   := '~' unary | primary
//! primary := rational | 'd(' term ',' term ')' | '|' term '|' | ident '(' term,* ')'
//!          | '(' formula ')' | ('sup' | 'inf') ident '.' formula
//! ```
//!
//! A quantifier body runs to the next unbalanced `)` or the end of input.
//! Terms: lattice operators bind loosest, then `+`/`-`, then `*`, then unary
//! minus. A literal directly followed by `*` scales the next factor.

use super::formula::Formula;
use super::signature::{ops, Signature, METRIC};
use super::term::Term;
use crate::rational::{self, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { offset: usize, name: String },
    #[error("`{name}` at offset {offset} expects {expected} argument(s), found {found}")]
    Arity { offset: usize, name: String, expected: usize, found: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownSymbol { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    MeetOp,
    JoinOp,
    Tilde,
    Bar,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Ident(i) => format!("`{i}`"),
            Tok::Eof => "end of input".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::MeetOp => "`/\\`".into(),
            Tok::JoinOp => "`\\/`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Dot => "`.`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push((start, Tok::Number(text[start..i].to_string())));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            b'/' if bytes.get(i + 1) == Some(&b'\\') => {
                i += 1;
                Tok::MeetOp
            }
            b'\\' if bytes.get(i + 1) == Some(&b'/') => {
                i += 1;
                Tok::JoinOp
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'~' => Tok::Tilde,
            b'|' => Tok::Bar,
            b'.' => Tok::Dot,
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", text[start..].chars().next().unwrap_or('?')),
                })
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    sig: &'a Signature,
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig };
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.syntax(format!("unexpected {}", self.peek().describe()))
        }
    }

    fn number(&self, text: &str) -> Result<Q, ParseError> {
        rational::parse(text).or_else(|_| self.syntax(format!("invalid rational `{text}`")))
    }

    /// A literal, optionally preceded by `-`. Does not consume anything otherwise.
    fn try_signed_number(&mut self) -> Result<Option<Q>, ParseError> {
        match (self.peek().clone(), self.peek_at(1).clone()) {
            (Tok::Number(n), _) => {
                self.bump();
                Ok(Some(self.number(&n)?))
            }
            (Tok::Minus, Tok::Number(n)) => {
                self.bump();
                self.bump();
                Ok(Some(-self.number(&n)?))
            }
            _ => Ok(None),
        }
    }

    fn require_fn(&self, offset: usize, name: &str, arity: usize) -> Result<(), ParseError> {
        match self.sig.function(name) {
            None => Err(ParseError::UnknownSymbol { offset, name: name.to_string() }),
            Some(s) if s.arity != arity => Err(ParseError::Arity {
                offset,
                name: name.to_string(),
                expected: s.arity,
                found: arity,
            }),
            Some(_) => Ok(()),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.prod()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Formula::sum(acc, self.prod()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = Formula::sub(acc, self.prod()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn prod(&mut self) -> Result<Formula, ParseError> {
        let save = self.pos;
        if let Some(r) = self.try_signed_number()? {
            if *self.peek() == Tok::Star {
                self.bump();
                return Ok(Formula::scale(r, self.lattice()?));
            }
            self.pos = save;
        } else if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Formula::scale(rational::int(-1), self.lattice()?));
        }
        self.lattice()
    }

    fn lattice(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::MeetOp => {
                    self.bump();
                    acc = Formula::meet(acc, self.unary()?);
                }
                Tok::JoinOp => {
                    self.bump();
                    acc = Formula::join(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(Formula::neg(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if let Some(r) = self.try_signed_number()? {
            return Ok(Formula::Const(r));
        }
        let offset = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Bar => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::Bar)?;
                if !self.sig.has_constant(ops::ZERO) {
                    return Err(ParseError::UnknownSymbol { offset, name: ops::ZERO.into() });
                }
                Ok(Formula::norm(t))
            }
            Tok::Ident(q) if q == "sup" || q == "inf" => {
                self.bump();
                let var = match self.bump() {
                    Tok::Ident(v) if !is_keyword(&v) => v,
                    _ => return Err(ParseError::Syntax { offset: self.toks[self.pos - 1].0, message: "expected a variable after quantifier".into() }),
                };
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if q == "sup" { Formula::sup(&var, body) } else { Formula::inf(&var, body) })
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let args = self.term_args()?;
                if name == METRIC {
                    if args.len() != 2 {
                        return Err(ParseError::Arity { offset, name, expected: 2, found: args.len() });
                    }
                    let mut it = args.into_iter();
                    let a = it.next().expect("two args");
                    let b = it.next().expect("two args");
                    return Ok(Formula::Dist(a, b));
                }
                match self.sig.relation(&name) {
                    None => Err(ParseError::UnknownSymbol { offset, name }),
                    Some(s) if s.arity != args.len() => Err(ParseError::Arity {
                        offset,
                        name,
                        expected: s.arity,
                        found: args.len(),
                    }),
                    Some(_) => Ok(Formula::Atom(name, args)),
                }
            }
            other => self.syntax(format!("expected a formula, found {}", other.describe())),
        }
    }

    /// Arguments after an opening parenthesis, through the closing one.
    fn term_args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    // ---- terms ----

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.term_add()?;
        loop {
            let offset = self.offset();
            match self.peek() {
                Tok::MeetOp => {
                    self.bump();
                    self.require_fn(offset, ops::MEET, 2)?;
                    acc = Term::meet(acc, self.term_add()?);
                }
                Tok::JoinOp => {
                    self.bump();
                    self.require_fn(offset, ops::JOIN, 2)?;
                    acc = Term::join(acc, self.term_add()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term_add(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.term_mul()?;
        loop {
            let offset = self.offset();
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    self.require_fn(offset, ops::ADD, 2)?;
                    acc = Term::add(acc, self.term_mul()?);
                }
                Tok::Minus => {
                    self.bump();
                    if !self.sig.has_function(ops::SUB, 2) {
                        self.require_fn(offset, ops::ADD, 2)?;
                        self.require_fn(offset, ops::NEG, 1)?;
                    }
                    acc = Term::sub(acc, self.term_mul()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term_mul(&mut self) -> Result<Term, ParseError> {
        let save = self.pos;
        let mut acc = match self.try_signed_number()? {
            Some(c) if *self.peek() == Tok::Star => {
                self.bump();
                Term::scale(c, self.term_unary()?)
            }
            Some(_) => {
                self.pos = save;
                self.term_unary()?
            }
            None => self.term_unary()?,
        };
        while *self.peek() == Tok::Star {
            let offset = self.offset();
            self.bump();
            self.require_fn(offset, ops::MUL, 2)?;
            acc = Term::mul(acc, self.term_unary()?);
        }
        Ok(acc)
    }

    fn term_unary(&mut self) -> Result<Term, ParseError> {
        let offset = self.offset();
        if *self.peek() == Tok::Minus {
            if let Tok::Number(n) = self.peek_at(1).clone() {
                self.bump();
                self.bump();
                return self.literal(&format!("-{n}"), offset);
            }
            self.bump();
            self.require_fn(offset, ops::NEG, 1)?;
            return Ok(Term::neg(self.term_unary()?));
        }
        self.term_atom()
    }

    fn literal(&self, text: &str, _offset: usize) -> Result<Term, ParseError> {
        if self.sig.has_constant(text) {
            return Ok(Term::constant(text));
        }
        Ok(Term::Num(self.number(text)?))
    }

    fn term_atom(&mut self) -> Result<Term, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Number(n) => self.literal(&n, offset),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) if is_keyword(&name) => Err(ParseError::Syntax {
                offset,
                message: format!("`{name}` cannot be used as a term"),
            }),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.term_args()?;
                    self.require_fn(offset, &name, args.len())?;
                    Ok(Term::App(name, args))
                } else if self.sig.has_constant(&name) {
                    Ok(Term::constant(&name))
                } else if self.sig.function(&name).is_some() {
                    let expected = self.sig.function(&name).map(|s| s.arity).unwrap_or(0);
                    Err(ParseError::Arity { offset, name, expected, found: 0 })
                } else {
                    Ok(Term::Var(name))
                }
            }
            other => Err(ParseError::Syntax { offset, message: format!("expected a term, found {}", other.describe()) }),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "sup" | "inf")
}
