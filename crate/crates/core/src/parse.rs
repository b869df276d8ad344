//! Text syntax for terms, flows and wirings.
//!
//! ```text
//! term  := atom ( "." term )?          -- `.` is the binary symbol, right-associative
//! atom  := "(" term ")" | VAR | SYM ( "(" term ( "," term )* ")" )?
//! flow  := term "<-" term
//! ```
//!
//! Identifiers starting with an uppercase letter are variables, except the
//! reserved `START` and `ACCEPT`. `star` is the distinguished constant.
//! A wiring file holds one flow per line; `#` starts a comment.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::semiring::{Flow, Wiring};
use crate::symbol::{Signature, STAR_NAME};
use crate::term::{Term, Var};

pub const START: &str = "START";
pub const ACCEPT: &str = "ACCEPT";

/// Variable names seen while parsing, numbered by first occurrence.
#[derive(Debug, Default, Clone)]
pub struct VarScope {
    ids: HashMap<String, Var>,
    names: Vec<String>,
}

impl VarScope {
    pub fn new() -> Self {
        Self::default()
    }

    fn lookup(&mut self, name: &str) -> Var {
        if let Some(&v) = self.ids.get(name) {
            return v;
        }
        let v = Var(self.names.len() as u32);
        self.ids.insert(name.to_string(), v);
        self.names.push(name.to_string());
        v
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize, col0: usize) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line,
            col0,
            _src: src,
        }
    }

    fn col(&self) -> usize {
        self.col0 + self.pos + 1
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>> {
        let mut out = Vec::new();
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            let col = self.col();
            match c {
                c if c.is_whitespace() => self.pos += 1,
                '(' => {
                    out.push((Tok::LParen, col));
                    self.pos += 1;
                }
                ')' => {
                    out.push((Tok::RParen, col));
                    self.pos += 1;
                }
                ',' => {
                    out.push((Tok::Comma, col));
                    self.pos += 1;
                }
                '.' | '•' => {
                    out.push((Tok::Dot, col));
                    self.pos += 1;
                }
                '<' if self.chars.get(self.pos + 1) == Some(&'-') => {
                    out.push((Tok::Arrow, col));
                    self.pos += 2;
                }
                '⊸' => {
                    return Err(Error::parse(self.line, col, "use `<-` for flows"));
                }
                c if c.is_ascii_alphanumeric() || c == '_' => {
                    let start = self.pos;
                    while self.pos < self.chars.len()
                        && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
                    {
                        self.pos += 1;
                    }
                    let word: String = self.chars[start..self.pos].iter().collect();
                    if word.starts_with(|c: char| c.is_ascii_digit()) {
                        return Err(Error::parse(self.line, col, format!("identifier `{word}` starts with a digit")));
                    }
                    out.push((Tok::Ident(word), col));
                }
                other => {
                    return Err(Error::parse(self.line, col, format!("unexpected character `{other}`")));
                }
            }
        }
        Ok(out)
    }
}

struct TermParser<'s> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    sig: &'s mut Signature,
    vars: &'s mut VarScope,
}

pub(crate) fn is_variable_name(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase()) && name != START && name != ACCEPT
}

impl TermParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col(), msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn term(&mut self) -> Result<Term> {
        let left = self.atom()?;
        if self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            let right = self.term()?;
            return Ok(Term::bullet(left, right));
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<Term> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if is_variable_name(&name) {
                    if self.peek() == Some(&Tok::LParen) {
                        return Err(self.err(format!("variable `{name}` cannot take arguments")));
                    }
                    return Ok(Term::Var(self.vars.lookup(&name)));
                }
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    args.push(self.term()?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                }
                if name == STAR_NAME && !args.is_empty() {
                    return Err(Error::parse(self.line, col, "`star` is a constant"));
                }
                let sym = self
                    .sig
                    .declare(&name, args.len())
                    .map_err(|e| Error::parse(self.line, col, e.to_string()))?;
                Ok(Term::app(sym, args))
            }
            Some(_) => Err(self.err("expected a term")),
            None => Err(self.err("unexpected end of input, expected a term")),
        }
    }
}

fn parse_tokens<T>(
    text: &str,
    line: usize,
    col0: usize,
    sig: &mut Signature,
    vars: &mut VarScope,
    body: impl FnOnce(&mut TermParser<'_>) -> Result<T>,
) -> Result<T> {
    let toks = Lexer::new(text, line, col0).tokens()?;
    let mut p = TermParser {
        toks,
        pos: 0,
        line,
        end_col: col0 + text.chars().count() + 1,
        sig,
        vars,
    };
    let out = body(&mut p)?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Parses one term with a shared signature and variable scope.
pub fn parse_term_with(text: &str, sig: &mut Signature, vars: &mut VarScope) -> Result<Term> {
    parse_tokens(text, 1, 0, sig, vars, |p| p.term())
}

/// Parses one term with a fresh signature; variables are numbered by first
/// occurrence.
pub fn parse_term(text: &str) -> Result<Term> {
    parse_term_with(text, &mut Signature::new(), &mut VarScope::new())
}

/// Parses `HEAD <- BODY` at the given line and column offset.
pub fn parse_flow_at(text: &str, line: usize, col0: usize, sig: &mut Signature) -> Result<Flow> {
    let mut vars = VarScope::new();
    let (head, body) = parse_tokens(text, line, col0, sig, &mut vars, |p| {
        let head = p.term()?;
        p.expect(Tok::Arrow, "`<-`")?;
        let body = p.term()?;
        Ok((head, body))
    })?;
    Flow::new(head, body).map_err(|e| Error::parse(line, col0 + 1, e.to_string()))
}

pub fn parse_flow(text: &str) -> Result<Flow> {
    parse_flow_at(text, 1, 0, &mut Signature::new())
}

/// Strips a `#` comment; returns `None` for blank lines.
pub(crate) fn content(line: &str) -> Option<&str> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    (!line.trim().is_empty()).then_some(line)
}

/// Parses a wiring file.
pub fn parse_wiring_with(text: &str, sig: &mut Signature) -> Result<Wiring> {
    let mut wiring = Wiring::zero();
    for (i, raw) in text.lines().enumerate() {
        if let Some(line) = content(raw) {
            wiring.insert(parse_flow_at(line, i + 1, 0, sig)?);
        }
    }
    Ok(wiring)
}

pub fn parse_wiring(text: &str) -> Result<Wiring> {
    parse_wiring_with(text, &mut Signature::new())
}
