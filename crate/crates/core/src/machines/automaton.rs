//! Two-way multi-head finite automata with a pushdown stack, and their
//! text format.
//!
//! ```text
//! states: q0 q1 rej
//! init: q0
//! input: a b
//! stack: x
//! heads: 1
//! reject: rej
//! trans:
//! (q0; a; _) -> (q0; +1; push x)
//! (q0; b; x) -> (q0; +1; pop)
//! (q0; $; x) -> (rej; 0; stay)
//! ```
//!
//! `^` and `$` are the left and right endmarkers, `_` the stack bottom.
//! `stay` leaves the stack unchanged; it is expanded into a push of a
//! synthesized marker followed by its pop. Entering a `reject:` state loops
//! forever; a configuration without applicable transition halts and accepts.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::parse::content;

/// What a head reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Begin,
    End,
    Char(char),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Begin => f.write_str("^"),
            Letter::End => f.write_str("$"),
            Letter::Char(c) => write!(f, "{c}"),
        }
    }
}

/// Top of the stack: the bottom marker or a stack symbol by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Top {
    Bottom,
    Sym(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StackAction {
    Pop,
    Push(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    pub read: Vec<Letter>,
    pub top: Top,
    pub to: usize,
    pub moves: Vec<i8>,
    pub action: StackAction,
}

impl Transition {
    /// The moving head and its direction, if any.
    pub fn mover(&self) -> Option<(usize, i8)> {
        self.moves.iter().enumerate().find(|(_, &m)| m != 0).map(|(j, &m)| (j, m))
    }
}

#[derive(Debug, Clone)]
pub struct Automaton {
    pub states: Vec<String>,
    pub init: usize,
    pub input: Vec<char>,
    pub stack: Vec<String>,
    pub heads: usize,
    pub transitions: Vec<Transition>,
    pub reject: BTreeSet<usize>,
}

impl Automaton {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Automaton(msg));
        if self.heads == 0 {
            return bad("at least one head is needed".into());
        }
        if self.init >= self.states.len() {
            return bad("initial state out of range".into());
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from >= self.states.len() || t.to >= self.states.len() {
                return bad(format!("transition {i}: state out of range"));
            }
            if t.read.len() != self.heads || t.moves.len() != self.heads {
                return bad(format!("transition {i}: expected {} heads", self.heads));
            }
            if t.moves.iter().any(|m| !(-1..=1).contains(m)) {
                return bad(format!("transition {i}: moves must be -1, 0 or +1"));
            }
            if t.moves.iter().filter(|&&m| m != 0).count() > 1 {
                return bad(format!("transition {i}: at most one head may move"));
            }
            if let Some(c) = t.read.iter().find_map(|l| match l {
                Letter::Char(c) if !self.input.contains(c) => Some(*c),
                _ => None,
            }) {
                return bad(format!("transition {i}: `{c}` is not an input letter"));
            }
            match (t.top, t.action) {
                (Top::Bottom, StackAction::Pop) => {
                    return bad(format!("transition {i}: the stack bottom cannot be popped"));
                }
                (Top::Sym(s), _) | (_, StackAction::Push(s)) if s >= self.stack.len() => {
                    return bad(format!("transition {i}: stack symbol out of range"));
                }
                _ => {}
            }
            if let StackAction::Push(s) = t.action {
                if s >= self.stack.len() {
                    return bad(format!("transition {i}: stack symbol out of range"));
                }
            }
        }
        Ok(())
    }

    pub fn is_reject(&self, state: usize) -> bool {
        self.reject.contains(&state)
    }

    /// Letters of `word` as read by a head at each cell `0..=n+1`.
    pub fn tape(&self, word: &str) -> Result<Vec<Letter>> {
        let mut tape = vec![Letter::Begin];
        for c in word.chars() {
            if !self.input.contains(&c) {
                return Err(Error::Automaton(format!("`{c}` is not an input letter")));
            }
            tape.push(Letter::Char(c));
        }
        tape.push(Letter::End);
        Ok(tape)
    }
}

struct Builder {
    states: Vec<String>,
    state_ids: HashMap<String, usize>,
    init: Option<String>,
    input: Vec<char>,
    stack: Vec<String>,
    heads: Option<usize>,
    reject: Vec<(usize, String)>,
    trans: Vec<(usize, String)>,
}

fn words(rest: &str) -> Vec<&str> {
    rest.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()).collect()
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !s.starts_with(|c: char| c.is_ascii_digit())
}

const STAY_MARKER: &str = "0stay";

/// Parses the `.aut` format.
pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut b = Builder {
        states: Vec::new(),
        state_ids: HashMap::new(),
        init: None,
        input: Vec::new(),
        stack: Vec::new(),
        heads: None,
        reject: Vec::new(),
        trans: Vec::new(),
    };
    let mut in_trans = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let Some(line) = content(raw) else { continue };
        let line = line.trim();
        if line.starts_with('(') {
            if !in_trans {
                return Err(Error::parse(line_no, 1, "transition outside the `trans:` section"));
            }
            b.trans.push((line_no, line.to_string()));
            continue;
        }
        let Some((key, rest)) = line.split_once(':') else {
            return Err(Error::parse(line_no, 1, "expected `section: values` or a transition"));
        };
        in_trans = false;
        let vals = words(rest);
        match key.trim() {
            "states" => {
                for v in vals {
                    if !is_ident(v) {
                        return Err(Error::parse(line_no, 1, format!("invalid state name `{v}`")));
                    }
                    if b.state_ids.insert(v.to_string(), b.states.len()).is_some() {
                        return Err(Error::parse(line_no, 1, format!("duplicate state `{v}`")));
                    }
                    b.states.push(v.to_string());
                }
            }
            "init" => match vals.as_slice() {
                [one] => b.init = Some(one.to_string()),
                _ => return Err(Error::parse(line_no, 1, "`init:` takes exactly one state")),
            },
            "input" => {
                for v in vals {
                    let mut cs = v.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) if c.is_ascii_lowercase() => {
                            if b.input.contains(&c) {
                                return Err(Error::parse(line_no, 1, format!("duplicate letter `{c}`")));
                            }
                            b.input.push(c)
                        }
                        _ => {
                            return Err(Error::parse(line_no, 1, format!("letters are single lowercase characters, got `{v}`")))
                        }
                    }
                }
            }
            "stack" => {
                for v in vals {
                    if !is_ident(v) || v == "_" {
                        return Err(Error::parse(line_no, 1, format!("invalid stack symbol `{v}`")));
                    }
                    if b.stack.iter().any(|s| s == v) {
                        return Err(Error::parse(line_no, 1, format!("duplicate stack symbol `{v}`")));
                    }
                    b.stack.push(v.to_string());
                }
            }
            "heads" => match vals.as_slice() {
                [n] => match n.parse::<usize>() {
                    Ok(k) if k >= 1 => b.heads = Some(k),
                    _ => return Err(Error::parse(line_no, 1, format!("invalid head count `{n}`"))),
                },
                _ => return Err(Error::parse(line_no, 1, "`heads:` takes one number")),
            },
            "reject" => b.reject.extend(vals.into_iter().map(|v| (line_no, v.to_string()))),
            "trans" => {
                in_trans = true;
                if !rest.trim().is_empty() {
                    b.trans.push((line_no, rest.trim().to_string()));
                }
            }
            other => return Err(Error::parse(line_no, 1, format!("unknown section `{other}`"))),
        }
    }
    b.finish()
}

impl Builder {
    fn state(&self, line: usize, name: &str) -> Result<usize> {
        self.state_ids
            .get(name)
            .copied()
            .ok_or_else(|| Error::parse(line, 1, format!("unknown state `{name}`")))
    }

    fn finish(mut self) -> Result<Automaton> {
        let heads = self.heads.unwrap_or(1);
        let init_name = self.init.clone().ok_or_else(|| Error::parse(1, 1, "missing `init:`"))?;
        let init = self.state(1, &init_name)?;
        let mut reject = BTreeSet::new();
        for (line, name) in &self.reject {
            reject.insert(self.state(*line, name)?);
        }
        let mut transitions = Vec::new();
        let trans = std::mem::take(&mut self.trans);
        for (line, text) in &trans {
            transitions.extend(self.transition(*line, text, heads)?);
        }
        let a = Automaton {
            states: self.states,
            init,
            input: self.input,
            stack: self.stack,
            heads,
            transitions,
            reject,
        };
        a.validate()?;
        Ok(a)
    }

    fn letter(&self, line: usize, s: &str) -> Result<Letter> {
        match s {
            "^" => Ok(Letter::Begin),
            "$" => Ok(Letter::End),
            _ => {
                let mut cs = s.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) if self.input.contains(&c) => Ok(Letter::Char(c)),
                    _ => Err(Error::parse(line, 1, format!("`{s}` is not an input letter or endmarker"))),
                }
            }
        }
    }

    fn stack_sym(&self, line: usize, s: &str) -> Result<usize> {
        self.stack
            .iter()
            .position(|b| b == s)
            .ok_or_else(|| Error::parse(line, 1, format!("unknown stack symbol `{s}`")))
    }

    fn stay_marker(&mut self) -> usize {
        match self.stack.iter().position(|b| b == STAY_MARKER) {
            Some(i) => i,
            None => {
                self.stack.push(STAY_MARKER.to_string());
                self.stack.len() - 1
            }
        }
    }

    fn transition(&mut self, line: usize, text: &str, heads: usize) -> Result<Vec<Transition>> {
        let err = |msg: &str| Error::parse(line, 1, msg.to_string());
        let (lhs, rhs) = text.split_once("->").ok_or_else(|| err("expected `->`"))?;
        let strip = |s: &str| -> Result<Vec<String>> {
            let s = s.trim();
            let inner = s
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| err("expected a parenthesized triple"))?;
            let parts: Vec<String> = inner.split(';').map(|p| p.trim().to_string()).collect();
            if parts.len() != 3 {
                return Err(err("expected three `;`-separated fields"));
            }
            Ok(parts)
        };
        let l = strip(lhs)?;
        let r = strip(rhs)?;
        let from = self.state(line, &l[0])?;
        let to = self.state(line, &r[0])?;
        let read = words(&l[1])
            .into_iter()
            .map(|s| self.letter(line, s))
            .collect::<Result<Vec<_>>>()?;
        if read.len() != heads {
            return Err(err(&format!("expected {heads} read symbols, got {}", read.len())));
        }
        let top = match l[2].as_str() {
            "_" => Top::Bottom,
            s => Top::Sym(self.stack_sym(line, s)?),
        };
        let moves = words(&r[1])
            .into_iter()
            .map(|m| match m {
                "-1" => Ok(-1),
                "0" => Ok(0),
                "+1" | "1" => Ok(1),
                _ => Err(err(&format!("invalid move `{m}`"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if moves.len() != heads {
            return Err(err(&format!("expected {heads} moves, got {}", moves.len())));
        }
        let action = words(&r[2]);
        let mk = |from, to, moves: Vec<i8>, action| Transition {
            from,
            read: read.clone(),
            top,
            to,
            moves,
            action,
        };
        match action.as_slice() {
            ["pop"] => {
                if top == Top::Bottom {
                    return Err(err("the stack bottom cannot be popped"));
                }
                Ok(vec![mk(from, to, moves, StackAction::Pop)])
            }
            ["push", s] => {
                let s = self.stack_sym(line, s)?;
                Ok(vec![mk(from, to, moves, StackAction::Push(s))])
            }
            ["stay"] => {
                let marker = self.stay_marker();
                let mid_name = format!("0stay{}", self.states.len());
                let mid = self.states.len();
                self.state_ids.insert(mid_name.clone(), mid);
                self.states.push(mid_name);
                let first = mk(from, mid, vec![0; heads], StackAction::Push(marker));
                let second = Transition {
                    from: mid,
                    read: read.clone(),
                    top: Top::Sym(marker),
                    to,
                    moves,
                    action: StackAction::Pop,
                };
                Ok(vec![first, second])
            }
            _ => Err(err("expected `pop`, `push SYMBOL` or `stay`")),
        }
    }
}
