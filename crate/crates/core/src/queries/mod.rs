//! Unary logic queries and their stack encoding.
//!
//! A query `(D, P, G)` succeeds when the goal `G` can be derived from the
//! facts `D` by the rules of `P`. Base constants `c` become unary twins `ĉ`,
//! so that data and goal turn into stack ops `τ(ĉ(x)) ⊸ START(x)` and
//! `ACCEPT(x) ⊸ τ(ĉ(x))`, and the query succeeds iff `ACCEPT(x) ⊸ START(x)`
//! lies in the saturation of `⌈D⌉ + P + ⌊G⌋`.

pub mod circuit;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::parse::{content, parse_flow_at, parse_term_with, VarScope, ACCEPT, START};
use crate::stack::{flatten, saturate, StackConfig, StackOp, StackWiring};
use crate::symbol::{Signature, Sym};
use crate::term::Term;

pub use circuit::{encode_cvp, eval_circuit, parse_circuit, Circuit, Gate};

const TWIN_PREFIX: &str = "_hat_";

fn start() -> Sym {
    Sym::unary(START)
}

fn accept() -> Sym {
    Sym::unary(ACCEPT)
}

fn twin(c: Sym) -> Sym {
    Sym::unary(&format!("{TWIN_PREFIX}{}", c.name()))
}

fn untwin(s: Sym) -> Option<Sym> {
    s.name().strip_prefix(TWIN_PREFIX).map(Sym::constant)
}

/// Splits a closed unary term `τ(c)` into `(τ, c)`.
fn closed_unary(t: &Term) -> Result<(Vec<Sym>, Sym)> {
    let (seq, base) = t.unary_prefix();
    match base {
        Term::App(c, args) if args.is_empty() => Ok((seq, *c)),
        _ => Err(Error::Query(format!("`{t}` is not a closed unary term"))),
    }
}

fn check_user_sym(s: Sym, what: &str) -> Result<()> {
    let name = s.name();
    if &*name == START || &*name == ACCEPT || s.is_reserved() {
        return Err(Error::Query(format!("reserved symbol `{name}` in {what}")));
    }
    Ok(())
}

/// A closed unary term, as the sequence of its symbols with the twin of the
/// base constant last.
type Fact = Vec<Sym>;

fn fact_of(t: &Term) -> Result<Fact> {
    let (mut seq, c) = closed_unary(t)?;
    seq.push(twin(c));
    Ok(seq)
}

fn term_of(fact: &[Sym]) -> Term {
    let (last, seq) = fact.split_last().expect("facts end with a twin");
    let base = untwin(*last).expect("facts end with a twin");
    Term::unary_chain(seq, Term::constant(base))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryQuery {
    pub data: BTreeSet<Term>,
    pub program: StackWiring,
    pub goal: Term,
}

impl UnaryQuery {
    /// Checks closure of data and goal and keeps reserved symbols out.
    pub fn new(data: impl IntoIterator<Item = Term>, program: StackWiring, goal: Term) -> Result<Self> {
        let data: BTreeSet<Term> = data.into_iter().collect();
        for t in data.iter().chain([&goal]) {
            let (seq, c) = closed_unary(t)?;
            for s in seq.into_iter().chain([c]) {
                check_user_sym(s, "data or goal")?;
            }
        }
        for s in program.symbols() {
            check_user_sym(s, "program")?;
        }
        Ok(UnaryQuery { data, program, goal })
    }

    /// Total number of symbol occurrences.
    pub fn size(&self) -> usize {
        self.data.iter().map(Term::size).sum::<usize>() + self.program.size() + self.goal.size()
    }

    /// `⌈D⌉ + P + ⌊G⌋`.
    pub fn wiring(&self) -> StackWiring {
        let mut w = encode_data(&self.data).expect("checked on construction");
        for op in self.program.iter() {
            w.insert(op.clone());
        }
        w.insert(encode_goal(&self.goal).expect("checked on construction"));
        w
    }
}

impl fmt::Display for UnaryQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "data:")?;
        for t in &self.data {
            writeln!(f, "  {t}")?;
        }
        writeln!(f, "program:")?;
        for op in self.program.iter() {
            writeln!(f, "  {}", op.to_flow())?;
        }
        writeln!(f, "goal:")?;
        writeln!(f, "  {}", self.goal)
    }
}

/// `⌈D⌉ = Σ τ(ĉ(x)) ⊸ START(x)`.
pub fn encode_data<'a>(data: impl IntoIterator<Item = &'a Term>) -> Result<StackWiring> {
    let mut w = StackWiring::zero();
    for t in data {
        w.insert(StackOp::new(fact_of(t)?, vec![start()])?);
    }
    Ok(w)
}

/// `⌊G⌋ = ACCEPT(x) ⊸ τ(ĉ(x))`.
pub fn encode_goal(goal: &Term) -> Result<StackOp> {
    StackOp::new(vec![accept()], fact_of(goal)?)
}

/// `ACCEPT(x) ⊸ START(x)`.
pub fn success_op() -> StackOp {
    StackOp::new(vec![accept()], vec![start()]).expect("unary")
}

/// Whether the goal is derivable, deciding membership of
/// `ACCEPT(x) ⊸ START(x)` in the saturation.
pub fn query_succeeds(q: &UnaryQuery) -> bool {
    query_succeeds_with(q, &StackConfig::default())
}

/// As [`query_succeeds`]. Above the flattening threshold the combined wiring
/// is flattened first; the result is again an encoded query, whose data and
/// goal are the chain links touching `START` and `ACCEPT`, so membership is
/// tested the same way.
pub fn query_succeeds_with(q: &UnaryQuery, cfg: &StackConfig) -> bool {
    let mut w = q.wiring();
    if w.height() > cfg.flatten_threshold {
        w = flatten(&w);
    }
    saturate(&w).contains(&success_op())
}

/// One resolution step of a derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// Index of the rule in the program, in iteration order.
    pub rule: usize,
    /// The fact derived by this step.
    pub fact: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    /// The datum the derivation starts from.
    pub datum: Term,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Derived(Derivation),
    /// Every derivable fact was found and none is the goal.
    Exhausted,
    /// The depth or fact budget ran out first.
    Unknown,
}

impl OracleVerdict {
    pub fn is_derived(&self) -> bool {
        matches!(self, OracleVerdict::Derived(_))
    }
}

/// Breadth-first resolution from the data, up to `depth` steps.
pub fn derivation_oracle(q: &UnaryQuery, depth: usize) -> OracleVerdict {
    derivation_oracle_with(q, depth, 1 << 22)
}

/// As [`derivation_oracle`], giving up once the known facts hold more than
/// `max_symbols` symbols in total.
pub fn derivation_oracle_with(q: &UnaryQuery, depth: usize, max_symbols: usize) -> OracleVerdict {
    let goal = fact_of(&q.goal).expect("checked on construction");
    let rules: Vec<&StackOp> = q.program.iter().collect();
    // fact -> (parent, rule)
    let mut seen: HashMap<Fact, Option<(Fact, usize)>> = HashMap::new();
    let mut queue: VecDeque<(Fact, usize)> = VecDeque::new();
    for t in &q.data {
        let f = fact_of(t).expect("checked on construction");
        if seen.insert(f.clone(), None).is_none() {
            queue.push_back((f, 0));
        }
    }
    let mut stored: usize = seen.keys().map(Vec::len).sum();
    let mut truncated = false;
    while let Some((f, d)) = queue.pop_front() {
        if f == goal {
            return OracleVerdict::Derived(witness(&seen, f));
        }
        if d == depth {
            truncated = true;
            continue;
        }
        for (k, r) in rules.iter().enumerate() {
            let Some(rest) = f.strip_prefix(r.pop()) else { continue };
            if rest.is_empty() {
                continue;
            }
            let next: Fact = r.push().iter().chain(rest).copied().collect();
            if seen.contains_key(&next) {
                continue;
            }
            stored += next.len();
            if stored > max_symbols {
                return OracleVerdict::Unknown;
            }
            seen.insert(next.clone(), Some((f.clone(), k)));
            queue.push_back((next, d + 1));
        }
    }
    if truncated {
        OracleVerdict::Unknown
    } else {
        OracleVerdict::Exhausted
    }
}

fn witness(seen: &HashMap<Fact, Option<(Fact, usize)>>, mut f: Fact) -> Derivation {
    let mut steps = Vec::new();
    while let Some((parent, rule)) = &seen[&f] {
        steps.push(Step { rule: *rule, fact: term_of(&f) });
        f = parent.clone();
    }
    steps.reverse();
    Derivation { datum: term_of(&f), steps }
}

/// Smallest `n ≤ max_n` with `ACCEPT(x) ⊸ START(x)` in `⌊G⌋Pⁿ⌈D⌉`, by
/// plain products.
pub fn naive_success(q: &UnaryQuery, max_n: usize) -> Option<usize> {
    let g = StackWiring::from_ops([encode_goal(&q.goal).expect("checked on construction")]);
    let mut x = encode_data(&q.data).expect("checked on construction");
    let target = success_op();
    for n in 0..=max_n {
        if g.product(&x).contains(&target) {
            return Some(n);
        }
        if x.is_empty() {
            return None;
        }
        x = q.program.product(&x);
    }
    None
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Data,
    Program,
    Goal,
}

/// Parses a query file with sections `data:`, `program:` and `goal:`.
pub fn parse_query(text: &str) -> Result<UnaryQuery> {
    let mut sig = Signature::new();
    let mut section = Section::None;
    let mut data = Vec::new();
    let mut program = StackWiring::zero();
    let mut goal: Option<(usize, Term)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let Some(line) = content(raw) else { continue };
        let trimmed = line.trim_start();
        let col0 = line.len() - trimmed.len();
        let mut body = trimmed;
        for (key, s) in [("data:", Section::Data), ("program:", Section::Program), ("goal:", Section::Goal)] {
            if let Some(rest) = trimmed.strip_prefix(key) {
                section = s;
                body = rest;
            }
        }
        if body.trim().is_empty() {
            continue;
        }
        let col = col0 + (trimmed.len() - body.len());
        let at = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::parse(line_no, col + 1, other.to_string()),
        };
        match section {
            Section::None => return Err(Error::parse(line_no, 1, "expected `data:`, `program:` or `goal:`")),
            Section::Data | Section::Goal => {
                let t = parse_term_with(body, &mut sig, &mut VarScope::new()).map_err(|e| shift(e, line_no, col))?;
                closed_unary(&t).map_err(at)?;
                if section == Section::Data {
                    data.push(t);
                } else if goal.replace((line_no, t)).is_some() {
                    return Err(Error::parse(line_no, col + 1, "more than one goal"));
                }
            }
            Section::Program => {
                let f = parse_flow_at(body, line_no, col, &mut sig)?;
                program.insert(StackOp::from_flow(&f).map_err(at)?);
            }
        }
    }
    let Some((_, goal)) = goal else {
        return Err(Error::Query("missing goal".into()));
    };
    UnaryQuery::new(data, program, goal)
}

/// Moves a parse error of a single term to its place in the file.
fn shift(e: Error, line: usize, col0: usize) -> Error {
    match e {
        Error::Parse { col, msg, .. } => Error::parse(line, col0 + col, msg),
        other => Error::parse(line, col0 + 1, other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_term, parse_wiring};

    fn query(data: &[&str], program: &str, goal: &str) -> UnaryQuery {
        let p = StackWiring::from_wiring(&parse_wiring(program).unwrap()).unwrap();
        UnaryQuery::new(data.iter().map(|t| parse_term(t).unwrap()), p, parse_term(goal).unwrap()).unwrap()
    }

    #[test]
    fn encodings() {
        let d = encode_data([&parse_term("f(c)").unwrap()]).unwrap();
        let op = d.iter().next().unwrap();
        assert_eq!(op.to_flow().to_string(), "f(_hat_c(X0)) <- START(X0)");
        let g = encode_goal(&Term::star()).unwrap();
        assert_eq!(g.to_flow().to_string(), "ACCEPT(X0) <- _hat_star(X0)");
        assert!(encode_data([]).unwrap().is_empty());
    }

    #[test]
    fn examples() {
        let cases = [
            (query(&["f(c)"], "", "f(c)"), true),
            (query(&["c"], "f(X) <- X", "f(c)"), true),
            (query(&["c"], "f(X) <- X", "g(c)"), false),
        ];
        for (q, expected) in cases {
            assert_eq!(query_succeeds(&q), expected, "{q}");
            assert_eq!(derivation_oracle(&q, 8).is_derived(), expected, "{q}");
            assert_eq!(naive_success(&q, 8).is_some(), expected, "{q}");
        }
    }

    #[test]
    fn witness_chain() {
        let q = query(&["c"], "f(X) <- X\ng(X) <- f(X)", "g(f(c))");
        let OracleVerdict::Derived(d) = derivation_oracle(&q, 5) else { panic!() };
        assert_eq!(d.datum.to_string(), "c");
        let facts: Vec<_> = d.steps.iter().map(|s| s.fact.to_string()).collect();
        assert_eq!(facts, ["f(c)", "f(f(c))", "g(f(c))"]);
        assert_eq!(derivation_oracle(&q, 2), OracleVerdict::Unknown);
    }

    #[test]
    fn no_rules_exhausts() {
        let q = query(&["c"], "", "d");
        assert_eq!(derivation_oracle(&q, 100), OracleVerdict::Exhausted);
        assert!(!query_succeeds(&q));
    }

    #[test]
    fn flattened_decision() {
        let q = query(&["f(g(h(c)))"], "k(X) <- g(h(X))\nX <- f(X)", "k(c)");
        let cfg = StackConfig {
            flatten_threshold: 1,
            ..StackConfig::default()
        };
        assert!(query_succeeds(&q));
        assert!(query_succeeds_with(&q, &cfg));
        let q = query(&["f(g(h(c)))"], "k(X) <- g(h(X))", "k(c)");
        assert!(!query_succeeds_with(&q, &cfg));
    }

    #[test]
    fn reserved_symbols_rejected() {
        let p = StackWiring::from_wiring(&parse_wiring("START(X) <- f(X)").unwrap()).unwrap();
        assert!(UnaryQuery::new([], p, Term::star()).is_err());
        assert!(UnaryQuery::new([parse_term("f(X)").unwrap()], StackWiring::zero(), Term::star()).is_err());
    }

    #[test]
    fn parse_and_print() {
        let text = "data:\n  f(c)\n  c\nprogram:\n  g(X) <- f(X)\ngoal: g(c)\n";
        let q = parse_query(text).unwrap();
        assert_eq!(q.data.len(), 2);
        assert_eq!(parse_query(&q.to_string()).unwrap(), q);
        assert!(parse_query("data:\nf(X)\ngoal:\nc").is_err());
        assert!(parse_query("data:\nc\n").is_err());
        let Err(Error::Parse { line, .. }) = parse_query("data:\nc\ngoal:\nf(") else { panic!() };
        assert_eq!(line, 4);
    }
}
