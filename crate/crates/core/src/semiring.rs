//! Flows, wirings and the resolution product.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symbol::Sym;
use crate::term::{unify, Term, Var};

/// An ordered pair `head ⊸ body` with `vars(head) ⊆ vars(body)`, stored in
/// canonical renaming form so that structural equality is equality up to
/// renaming.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flow {
    head: Term,
    body: Term,
}

impl Flow {
    pub fn new(head: Term, body: Term) -> Result<Flow> {
        let body_vars = body.vars();
        if let Some(v) = head.vars().into_iter().find(|v| !body_vars.contains(v)) {
            return Err(Error::HeadVarNotInBody(format!("{v} in {head} <- {body}")));
        }
        Ok(Flow::canonical(head, body))
    }

    fn canonical(head: Term, body: Term) -> Flow {
        let mut map = HashMap::new();
        let head = head.rename_with(&mut map);
        let body = body.rename_with(&mut map);
        Flow { head, body }
    }

    /// The unit `x ⊸ x`.
    pub fn identity() -> Flow {
        Flow {
            head: Term::var(0),
            body: Term::var(0),
        }
    }

    pub fn head(&self) -> &Term {
        &self.head
    }

    pub fn body(&self) -> &Term {
        &self.body
    }

    pub fn height(&self) -> usize {
        self.head.height().max(self.body.height())
    }

    pub fn size(&self) -> usize {
        self.head.size() + self.body.size()
    }

    fn var_span(&self) -> u32 {
        self.body.max_var().map_or(0, |m| m + 1)
    }

    /// Resolution product; `None` is the zero result.
    pub fn product(&self, other: &Flow) -> Option<Flow> {
        let offset = self.var_span();
        let v = other.head.shift_vars(offset);
        let w = other.body.shift_vars(offset);
        let theta = unify(&self.body, &v)?;
        Some(Flow::canonical(theta.apply(&self.head), theta.apply(&w)))
    }

    /// `(u ⊸ v) • (t ⊸ w) = u•t ⊸ v•w` on renamed-apart representatives.
    pub fn tensor(&self, other: &Flow) -> Flow {
        let offset = self.var_span();
        Flow::canonical(
            Term::bullet(self.head.clone(), other.head.shift_vars(offset)),
            Term::bullet(self.body.clone(), other.body.shift_vars(offset)),
        )
    }

    /// Head and body are matchable; equivalently `f·f ≠ 0`.
    pub fn is_cycle(&self) -> bool {
        crate::term::matchable(&self.head, &self.body)
    }

    /// Built from unary symbols and a single variable.
    pub fn is_unary(&self) -> bool {
        match (self.head.as_unary_chain(), self.body.as_unary_chain()) {
            (Some((_, a)), Some((_, b))) => a == b,
            _ => false,
        }
    }

    pub fn symbols(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.head.visit_syms(&mut |s| {
            out.insert(s);
        });
        self.body.visit_syms(&mut |s| {
            out.insert(s);
        });
        out
    }

    pub fn is_closed(&self) -> bool {
        self.body.is_closed()
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- {}", self.head, self.body)
    }
}

impl fmt::Debug for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Product of two flows, `None` standing for zero.
pub fn flow_product(f: &Flow, g: &Flow) -> Option<Flow> {
    f.product(g)
}

const PARALLEL_PAIRS: usize = 4096;

/// A finite set of flows. Sum is union, `0` is the empty set.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wiring {
    flows: BTreeSet<Flow>,
}

impl Wiring {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Wiring::from_flows([Flow::identity()])
    }

    pub fn from_flows(flows: impl IntoIterator<Item = Flow>) -> Self {
        Wiring {
            flows: flows.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, f: Flow) -> bool {
        self.flows.insert(f)
    }

    pub fn contains(&self, f: &Flow) -> bool {
        self.flows.contains(f)
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Flow> {
        self.flows.iter()
    }

    pub fn sum(&self, other: &Wiring) -> Wiring {
        Wiring {
            flows: self.flows.union(&other.flows).cloned().collect(),
        }
    }

    pub fn product(&self, other: &Wiring) -> Wiring {
        wiring_product(self, other)
    }

    pub fn tensor(&self, other: &Wiring) -> Wiring {
        tensor(self, other)
    }

    /// `F^n` for `n ≥ 1`.
    pub fn power(&self, n: usize) -> Wiring {
        assert!(n >= 1, "powers start at 1");
        let mut acc = self.clone();
        for _ in 1..n {
            if acc.is_empty() {
                break;
            }
            acc = wiring_product(&acc, self);
        }
        acc
    }

    pub fn height(&self) -> usize {
        self.flows.iter().map(Flow::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.flows.iter().map(Flow::size).sum()
    }

    pub fn is_unary(&self) -> bool {
        self.flows.iter().all(Flow::is_unary)
    }

    pub fn symbols(&self) -> BTreeSet<Sym> {
        self.flows.iter().flat_map(Flow::symbols).collect()
    }
}

impl FromIterator<Flow> for Wiring {
    fn from_iter<I: IntoIterator<Item = Flow>>(iter: I) -> Self {
        Wiring::from_flows(iter)
    }
}

impl<'a> IntoIterator for &'a Wiring {
    type Item = &'a Flow;
    type IntoIter = std::collections::btree_set::Iter<'a, Flow>;
    fn into_iter(self) -> Self::IntoIter {
        self.flows.iter()
    }
}

impl fmt::Display for Wiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for flow in &self.flows {
            writeln!(f, "{flow}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Wiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.flows.iter()).finish()
    }
}

/// `FG = {fg : f ∈ F, g ∈ G, fg ≠ 0}`.
pub fn wiring_product(f: &Wiring, g: &Wiring) -> Wiring {
    if f.len() * g.len() >= PARALLEL_PAIRS {
        let parts: Vec<Vec<Flow>> = f
            .flows
            .par_iter()
            .map(|a| g.flows.iter().filter_map(|b| a.product(b)).collect())
            .collect();
        return parts.into_iter().flatten().collect();
    }
    f.flows
        .iter()
        .flat_map(|a| g.flows.iter().filter_map(move |b| a.product(b)))
        .collect()
}

/// `(Σ fᵢ) • (Σ gⱼ) = Σ fᵢ • gⱼ`.
pub fn tensor(f: &Wiring, g: &Wiring) -> Wiring {
    f.flows
        .iter()
        .flat_map(|a| g.flows.iter().map(move |b| a.tensor(b)))
        .collect()
}

/// Outcome of iterating powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveVerdict {
    /// `F^n = 0`, with `n` the least such exponent.
    Nilpotent(usize),
    /// `F^k` holds a cycle; only reported for unary wirings, where a cycle
    /// iterates forever.
    CycleFound(usize),
    /// Gave up after the given number of powers.
    Inconclusive(usize),
}

impl NaiveVerdict {
    pub fn is_nilpotent(self) -> bool {
        matches!(self, NaiveVerdict::Nilpotent(_))
    }
}

/// Iterates `F, F², …` up to `max_iter` powers.
pub fn naive_nilpotency(f: &Wiring, max_iter: usize) -> NaiveVerdict {
    naive_nilpotency_bounded(f, max_iter, usize::MAX)
}

/// As [`naive_nilpotency`], but also gives up once a power holds more than
/// `max_elements` flows.
pub fn naive_nilpotency_bounded(f: &Wiring, max_iter: usize, max_elements: usize) -> NaiveVerdict {
    assert!(max_iter >= 1, "max_iter must be positive");
    let cycle_shortcut = f.is_unary();
    let mut power = f.clone();
    for k in 1..=max_iter {
        if power.is_empty() {
            return NaiveVerdict::Nilpotent(k);
        }
        if cycle_shortcut && power.iter().any(Flow::is_cycle) {
            return NaiveVerdict::CycleFound(k);
        }
        if k == max_iter || power.len() > max_elements {
            return NaiveVerdict::Inconclusive(k);
        }
        power = wiring_product(&power, f);
    }
    unreachable!()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Imbalance {
    pub flow: Flow,
    pub var: Var,
    pub heights: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceReport {
    pub balanced: bool,
    pub offending: Option<Imbalance>,
}

/// A flow is balanced if each variable occurs at one single height across
/// head and body.
pub fn flow_imbalance(f: &Flow) -> Option<(Var, usize, usize)> {
    let mut seen: HashMap<Var, usize> = HashMap::new();
    let mut clash = None;
    let mut visit = |v: Var, d: usize| {
        if clash.is_some() {
            return;
        }
        match seen.get(&v) {
            Some(&prev) if prev != d => clash = Some((v, prev, d)),
            Some(_) => {}
            None => {
                seen.insert(v, d);
            }
        }
    };
    f.head().visit_var_depths(0, &mut visit);
    f.body().visit_var_depths(0, &mut visit);
    clash
}

pub fn is_balanced(f: &Wiring) -> BalanceReport {
    for flow in f {
        if let Some((var, a, b)) = flow_imbalance(flow) {
            return BalanceReport {
                balanced: false,
                offending: Some(Imbalance {
                    flow: flow.clone(),
                    var,
                    heights: (a, b),
                }),
            };
        }
    }
    BalanceReport {
        balanced: true,
        offending: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_flow, parse_wiring};

    fn fl(s: &str) -> Flow {
        parse_flow(s).unwrap()
    }

    #[test]
    fn composition_examples() {
        let f1 = fl("h(X) <- g(X)");
        let f2 = fl("g(X) <- f(X)");
        assert_eq!(flow_product(&f1, &f2), Some(fl("h(X) <- f(X)")));
        assert_eq!(flow_product(&f2, &f1), None);
        let id = Flow::identity();
        assert_eq!(id.product(&f1), Some(f1.clone()));
        assert_eq!(f1.product(&id), Some(f1.clone()));
    }

    #[test]
    fn non_unary_cycle_dies() {
        let f = fl("X . c <- d . X");
        let f2 = f.product(&f).unwrap();
        assert_eq!(f2, fl("c . c <- d . d"));
        assert!(f.is_cycle());
        assert_eq!(f2.product(&f), None);
        assert_eq!(f.product(&f2), None);
        assert_eq!(naive_nilpotency(&Wiring::from_flows([f]), 10), NaiveVerdict::Nilpotent(3));
    }

    #[test]
    fn head_vars_must_occur_in_body() {
        assert!(Flow::new(Term::var(0), Term::star()).is_err());
    }

    #[test]
    fn wiring_products() {
        let w = parse_wiring("h(X) <- g(X)\ng(X) <- f(X)").unwrap();
        assert_eq!(w.product(&w), parse_wiring("h(X) <- f(X)").unwrap());
        assert!(w.product(&Wiring::zero()).is_empty());
        assert!(Wiring::zero().product(&w).is_empty());
        assert_eq!(Wiring::unit().product(&w), w);
    }

    #[test]
    fn tensor_instance() {
        let a = Wiring::from_flows([fl("f(X) <- g(X)")]);
        let b = Wiring::from_flows([fl("a <- b")]);
        assert_eq!(a.tensor(&b), Wiring::from_flows([fl("f(X) . a <- g(X) . b")]));
        assert!(Wiring::zero().tensor(&a).is_empty());
    }

    #[test]
    fn naive_chain() {
        let w = parse_wiring("f(X) <- g(X)\ng(X) <- h(X)").unwrap();
        assert_eq!(naive_nilpotency(&w, 10), NaiveVerdict::Nilpotent(3));
        assert_eq!(naive_nilpotency(&Wiring::zero(), 1), NaiveVerdict::Nilpotent(1));
        let loopy = parse_wiring("f(X) <- X").unwrap();
        assert_eq!(naive_nilpotency(&loopy, 10), NaiveVerdict::CycleFound(1));
    }

    #[test]
    fn balance() {
        let r = is_balanced(&parse_wiring("f(X) <- g(X)").unwrap());
        assert!(r.balanced);
        assert!(is_balanced(&Wiring::unit()).balanced);
        let r = is_balanced(&parse_wiring("X . f(X) <- g(X) . X").unwrap());
        assert!(!r.balanced);
        let off = r.offending.unwrap();
        assert_eq!(off.var, Var(0));
        assert_eq!(off.heights, (1, 2));
    }
}
