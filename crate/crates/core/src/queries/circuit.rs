//! Boolean circuits and their encoding as unary queries, where a fact is a
//! stack of values still needed at some gates.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::parse::content;
use crate::stack::{StackOp, StackWiring};
use crate::symbol::Sym;
use crate::term::Term;

use super::UnaryQuery;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    And(usize, usize),
    Or(usize, usize),
    Not(usize),
    Zero,
    One,
}

impl Gate {
    pub fn inputs(&self) -> Vec<usize> {
        match *self {
            Gate::And(a, b) | Gate::Or(a, b) => vec![a, b],
            Gate::Not(a) => vec![a],
            Gate::Zero | Gate::One => vec![],
        }
    }
}

/// Gate `i` is named `names[i]` and computed by `gates[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    names: Vec<String>,
    gates: Vec<Gate>,
    output: usize,
    /// Gates in evaluation order.
    order: Vec<usize>,
}

impl Circuit {
    /// Checks names, references and acyclicity.
    pub fn new(names: Vec<String>, gates: Vec<Gate>, output: usize) -> Result<Self> {
        if names.len() != gates.len() {
            return Err(Error::Circuit("one name per gate".into()));
        }
        let mut uniq = BTreeSet::new();
        for n in &names {
            if !is_gate_name(n) {
                return Err(Error::Circuit(format!("invalid gate name `{n}`")));
            }
            if !uniq.insert(n) {
                return Err(Error::Circuit(format!("gate `{n}` defined twice")));
            }
        }
        if output >= gates.len() || gates.iter().flat_map(Gate::inputs).any(|i| i >= gates.len()) {
            return Err(Error::Circuit("reference to an undefined gate".into()));
        }
        let order = topological(&gates).ok_or_else(|| Error::Circuit("cyclic circuit".into()))?;
        Ok(Circuit { names, gates, output, order })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// Kahn's algorithm; `None` on a cycle.
fn topological(gates: &[Gate]) -> Option<Vec<usize>> {
    let mut indegree: Vec<usize> = gates.iter().map(|g| g.inputs().len()).collect();
    let mut users = vec![Vec::new(); gates.len()];
    for (i, g) in gates.iter().enumerate() {
        for a in g.inputs() {
            users[a].push(i);
        }
    }
    let mut ready: Vec<usize> = (0..gates.len()).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(gates.len());
    while let Some(i) = ready.pop() {
        order.push(i);
        for &u in &users[i] {
            indegree[u] -= 1;
            if indegree[u] == 0 {
                ready.push(u);
            }
        }
    }
    (order.len() == gates.len()).then_some(order)
}

fn is_gate_name(n: &str) -> bool {
    !n.is_empty() && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |i: usize| &self.names[i];
        for (i, g) in self.gates.iter().enumerate() {
            match *g {
                Gate::And(a, b) => writeln!(f, "gate {} = and({}, {})", n(i), n(a), n(b))?,
                Gate::Or(a, b) => writeln!(f, "gate {} = or({}, {})", n(i), n(a), n(b))?,
                Gate::Not(a) => writeln!(f, "gate {} = not({})", n(i), n(a))?,
                Gate::Zero => writeln!(f, "gate {} = zero", n(i))?,
                Gate::One => writeln!(f, "gate {} = one", n(i))?,
            }
        }
        writeln!(f, "output {}", n(self.output))
    }
}

/// Value of the output gate.
pub fn eval_circuit(c: &Circuit) -> bool {
    let mut val = vec![false; c.gates.len()];
    for &i in &c.order {
        val[i] = match c.gates[i] {
            Gate::And(a, b) => val[a] && val[b],
            Gate::Or(a, b) => val[a] || val[b],
            Gate::Not(a) => !val[a],
            Gate::Zero => false,
            Gate::One => true,
        };
    }
    val[c.output]
}

/// The query `(hi_o(⋆), Σ[e], ⋆)`, where `hi_v` means "1 is needed at `v`"
/// and `lo_v` "0 is needed at `v`".
pub fn encode_cvp(c: &Circuit) -> UnaryQuery {
    let hi = |i: usize| Sym::unary(&format!("hi_{}", c.names[i]));
    let lo = |i: usize| Sym::unary(&format!("lo_{}", c.names[i]));
    let op = |push: Vec<Sym>, pop: Vec<Sym>| StackOp::new(push, pop).expect("unary");
    let mut program = StackWiring::zero();
    for (v, g) in c.gates.iter().enumerate() {
        let ops = match *g {
            Gate::And(a, b) => vec![op(vec![hi(a), hi(b)], vec![hi(v)]), op(vec![lo(a)], vec![lo(v)]), op(vec![lo(b)], vec![lo(v)])],
            Gate::Or(a, b) => vec![op(vec![hi(a)], vec![hi(v)]), op(vec![hi(b)], vec![hi(v)]), op(vec![lo(a), lo(b)], vec![lo(v)])],
            Gate::Not(a) => vec![op(vec![lo(a)], vec![hi(v)]), op(vec![hi(a)], vec![lo(v)])],
            Gate::Zero => vec![op(vec![], vec![lo(v)])],
            Gate::One => vec![op(vec![], vec![hi(v)])],
        };
        for o in ops {
            program.insert(o);
        }
    }
    let data = Term::app(hi(c.output), vec![Term::star()]);
    UnaryQuery::new([data], program, Term::star()).expect("gate names are not reserved")
}

/// Parses `gate ID = and(A, B) | or(A, B) | not(A) | zero | one` lines and
/// one `output ID` line.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut names = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut defs: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut output: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let Some(line) = content(raw) else { continue };
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("output ") {
            let name = rest.trim();
            if output.replace((line_no, name.to_string())).is_some() {
                return Err(Error::parse(line_no, 1, "more than one output"));
            }
            continue;
        }
        let Some(rest) = line.strip_prefix("gate ") else {
            return Err(Error::parse(line_no, 1, "expected `gate` or `output`"));
        };
        let Some((name, expr)) = rest.split_once('=') else {
            return Err(Error::parse(line_no, 1, "expected `gate ID = EXPR`"));
        };
        let name = name.trim();
        if !is_gate_name(name) {
            return Err(Error::parse(line_no, 6, format!("invalid gate name `{name}`")));
        }
        if ids.insert(name.to_string(), names.len()).is_some() {
            return Err(Error::parse(line_no, 6, format!("gate `{name}` defined twice")));
        }
        names.push(name.to_string());
        let expr = expr.trim();
        let (op, args) = match expr.split_once('(') {
            Some((op, args)) => {
                let Some(args) = args.trim_end().strip_suffix(')') else {
                    return Err(Error::parse(line_no, 1, "missing `)`"));
                };
                (op.trim(), args.split(',').map(|a| a.trim().to_string()).collect())
            }
            None => (expr, Vec::new()),
        };
        defs.push((line_no, op.to_string(), args));
    }
    let resolve = |line: usize, n: &str| ids.get(n).copied().ok_or_else(|| Error::parse(line, 1, format!("undefined gate `{n}`")));
    let mut gates = Vec::new();
    for (line, op, args) in &defs {
        let arg = |k: usize| resolve(*line, &args[k]);
        let gate = match (op.as_str(), args.len()) {
            ("and", 2) => Gate::And(arg(0)?, arg(1)?),
            ("or", 2) => Gate::Or(arg(0)?, arg(1)?),
            ("not", 1) => Gate::Not(arg(0)?),
            ("zero", 0) => Gate::Zero,
            ("one", 0) => Gate::One,
            _ => return Err(Error::parse(*line, 1, format!("unknown gate `{op}` with {} inputs", args.len()))),
        };
        gates.push(gate);
    }
    let Some((line, out)) = output else {
        return Err(Error::Circuit("missing `output`".into()));
    };
    let output = resolve(line, &out)?;
    Circuit::new(names, gates, output)
}
