//! The Stack semiring: unary flows `τ(x) ⊸ σ(x)` as pairs of symbol
//! sequences, saturation and the nilpotency decision.

mod flatten;
mod nilpotency;

pub use flatten::flatten;
pub use nilpotency::{
    incr_nilpotent, incr_nilpotent_with, stack_nilpotent, stack_nilpotent_with, truncation, IncrMethod,
    StackConfig,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::semiring::{Flow, Wiring};
use crate::symbol::Sym;
use crate::term::Term;

/// `push(x) ⊸ pop(x)`; sequences list symbols outermost first, so the first
/// element is the top of the stack.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StackOp {
    push: Vec<Sym>,
    pop: Vec<Sym>,
}

impl StackOp {
    pub fn new(push: Vec<Sym>, pop: Vec<Sym>) -> Result<StackOp> {
        if let Some(s) = push.iter().chain(&pop).find(|s| s.arity() != 1) {
            return Err(Error::NotUnary(format!("symbol `{s}` has arity {}", s.arity())));
        }
        Ok(StackOp { push, pop })
    }

    pub(crate) fn new_unchecked(push: Vec<Sym>, pop: Vec<Sym>) -> StackOp {
        StackOp { push, pop }
    }

    pub fn from_flow(f: &Flow) -> Result<StackOp> {
        match (f.head().as_unary_chain(), f.body().as_unary_chain()) {
            (Some((push, a)), Some((pop, b))) if a == b => Ok(StackOp { push, pop }),
            _ => Err(Error::NotUnary(f.to_string())),
        }
    }

    pub fn to_flow(&self) -> Flow {
        Flow::new(
            Term::unary_chain(&self.push, Term::var(0)),
            Term::unary_chain(&self.pop, Term::var(0)),
        )
        .expect("unary flows share their variable")
    }

    pub fn identity() -> StackOp {
        StackOp {
            push: Vec::new(),
            pop: Vec::new(),
        }
    }

    pub fn push(&self) -> &[Sym] {
        &self.push
    }

    pub fn pop(&self) -> &[Sym] {
        &self.pop
    }

    pub fn height(&self) -> usize {
        self.push.len().max(self.pop.len())
    }

    pub fn size(&self) -> usize {
        self.push.len() + self.pop.len()
    }

    pub fn is_increasing(&self) -> bool {
        self.push.len() >= self.pop.len()
    }

    pub fn is_decreasing(&self) -> bool {
        self.push.len() <= self.pop.len()
    }

    pub fn is_cycle(&self) -> bool {
        prefix_comparable(&self.push, &self.pop)
    }

    /// Swaps push and pop.
    pub fn dagger(&self) -> StackOp {
        StackOp {
            push: self.pop.clone(),
            pop: self.push.clone(),
        }
    }

    /// Product on sequences: `(τ,σ)(ρ,χ)` is `(τ, χμ)` when `σ = ρμ`,
    /// `(τμ, χ)` when `ρ = σμ`, and zero otherwise.
    pub fn product(&self, other: &StackOp) -> Option<StackOp> {
        let (sigma, rho) = (&self.pop, &other.push);
        if rho.len() <= sigma.len() {
            if !sigma.starts_with(rho) {
                return None;
            }
            let mut pop = other.pop.clone();
            pop.extend_from_slice(&sigma[rho.len()..]);
            Some(StackOp {
                push: self.push.clone(),
                pop,
            })
        } else {
            if !rho.starts_with(sigma) {
                return None;
            }
            let mut push = self.push.clone();
            push.extend_from_slice(&rho[sigma.len()..]);
            Some(StackOp {
                push,
                pop: other.pop.clone(),
            })
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        self.push.iter().chain(&self.pop).copied()
    }
}

pub(crate) fn prefix_comparable(a: &[Sym], b: &[Sym]) -> bool {
    let n = a.len().min(b.len());
    a[..n] == b[..n]
}

impl fmt::Display for StackOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_flow(), f)
    }
}

impl fmt::Debug for StackOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite set of stack operations.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct StackWiring {
    ops: BTreeSet<StackOp>,
}

impl StackWiring {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_ops(ops: impl IntoIterator<Item = StackOp>) -> Self {
        StackWiring {
            ops: ops.into_iter().collect(),
        }
    }

    pub fn from_wiring(w: &Wiring) -> Result<Self> {
        w.iter().map(StackOp::from_flow).collect()
    }

    pub fn to_wiring(&self) -> Wiring {
        self.ops.iter().map(StackOp::to_flow).collect()
    }

    pub fn insert(&mut self, op: StackOp) -> bool {
        self.ops.insert(op)
    }

    pub fn contains(&self, op: &StackOp) -> bool {
        self.ops.contains(op)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &StackOp> {
        self.ops.iter()
    }

    pub fn height(&self) -> usize {
        self.ops.iter().map(StackOp::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.ops.iter().map(StackOp::size).sum()
    }

    pub fn symbols(&self) -> BTreeSet<Sym> {
        self.ops.iter().flat_map(StackOp::symbols).collect()
    }

    pub fn is_increasing(&self) -> bool {
        self.ops.iter().all(StackOp::is_increasing)
    }

    pub fn is_decreasing(&self) -> bool {
        self.ops.iter().all(StackOp::is_decreasing)
    }

    pub fn dagger(&self) -> StackWiring {
        self.ops.iter().map(StackOp::dagger).collect()
    }

    pub fn sum(&self, other: &StackWiring) -> StackWiring {
        self.ops.union(&other.ops).cloned().collect()
    }

    pub fn product(&self, other: &StackWiring) -> StackWiring {
        self.ops
            .iter()
            .flat_map(|a| other.ops.iter().filter_map(move |b| a.product(b)))
            .collect()
    }

    pub fn power(&self, n: usize) -> StackWiring {
        assert!(n >= 1, "powers start at 1");
        let mut acc = self.clone();
        for _ in 1..n {
            if acc.is_empty() {
                break;
            }
            acc = acc.product(self);
        }
        acc
    }
}

impl FromIterator<StackOp> for StackWiring {
    fn from_iter<I: IntoIterator<Item = StackOp>>(iter: I) -> Self {
        StackWiring::from_ops(iter)
    }
}

impl<'a> IntoIterator for &'a StackWiring {
    type Item = &'a StackOp;
    type IntoIter = std::collections::btree_set::Iter<'a, StackOp>;
    fn into_iter(self) -> Self::IntoIter {
        self.ops.iter()
    }
}

impl fmt::Display for StackWiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for StackWiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ops.iter()).finish()
    }
}

/// `(F↑, F↓)`; height-neutral ops land in both.
pub fn split(f: &StackWiring) -> (StackWiring, StackWiring) {
    let up = f.iter().filter(|o| o.is_increasing()).cloned().collect();
    let down = f.iter().filter(|o| o.is_decreasing()).cloned().collect();
    (up, down)
}

/// `F + F↓F↑`.
pub fn shortcut(f: &StackWiring) -> StackWiring {
    let (up, down) = split(f);
    f.sum(&down.product(&up))
}

/// Ops keyed by one of their sequences, answering "which keys are
/// prefix-comparable with this sequence".
#[derive(Default)]
struct PrefixIndex {
    by_key: BTreeMap<Vec<Sym>, Vec<usize>>,
}

impl PrefixIndex {
    fn insert(&mut self, key: &[Sym], id: usize) {
        self.by_key.entry(key.to_vec()).or_default().push(id);
    }

    fn comparable(&self, seq: &[Sym], out: &mut Vec<usize>) {
        for n in 0..seq.len() {
            if let Some(ids) = self.by_key.get(&seq[..n]) {
                out.extend_from_slice(ids);
            }
        }
        for (key, ids) in self.by_key.range(seq.to_vec()..) {
            if !key.starts_with(seq) {
                break;
            }
            out.extend_from_slice(ids);
        }
    }
}

/// How an element of a saturation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// The i-th op of the input, in iteration order.
    Input(usize),
    /// Product of a decreasing and an increasing element, by index.
    Product(usize, usize),
}

/// The least fixpoint of [`shortcut`] above `F`, with bookkeeping.
#[derive(Debug, Clone)]
pub struct Saturation {
    ops: Vec<StackOp>,
    origins: Vec<Origin>,
    /// Number of shortcut applications until stability.
    pub rounds: usize,
    /// Sizes of `shortⁿ(F)` for `n = 0..=rounds`.
    pub sizes: Vec<usize>,
}

impl Saturation {
    pub fn wiring(&self) -> StackWiring {
        self.ops.iter().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// A sequence of input ops whose product is `op`, if `op` is in the
    /// saturation and the expansion stays within `max_len` factors.
    pub fn witness(&self, op: &StackOp, max_len: usize) -> Option<Vec<StackOp>> {
        let start = self.ops.iter().position(|o| o == op)?;
        let mut out = Vec::new();
        let mut todo = vec![start];
        while let Some(i) = todo.pop() {
            match self.origins[i] {
                Origin::Input(_) => {
                    out.push(self.ops[i].clone());
                    if out.len() > max_len {
                        return None;
                    }
                }
                Origin::Product(d, u) => {
                    todo.push(u);
                    todo.push(d);
                }
            }
        }
        Some(out)
    }

    pub fn origin(&self, op: &StackOp) -> Option<Origin> {
        self.ops.iter().position(|o| o == op).map(|i| self.origins[i])
    }
}

const PARALLEL_ROUND: usize = 256;

/// Computes the saturation semi-naively: round `n` only forms products with
/// at least one factor new in round `n-1`, so the accumulated set after
/// round `n` is exactly `shortⁿ(F)`.
pub fn saturate_traced(f: &StackWiring) -> Saturation {
    let mut ops: Vec<StackOp> = f.iter().cloned().collect();
    let mut origins: Vec<Origin> = (0..ops.len()).map(Origin::Input).collect();
    let mut seen: HashMap<StackOp, usize> = ops.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
    // Decreasing ops indexed by pop, increasing ops indexed by push: the
    // product d·u is nonzero iff pop(d) and push(u) are prefix-comparable.
    let mut downs = PrefixIndex::default();
    let mut ups = PrefixIndex::default();
    let mut frontier: Vec<usize> = (0..ops.len()).collect();
    for &i in &frontier {
        index_op(&ops[i], i, &mut downs, &mut ups);
    }
    let mut rounds = 0;
    let mut sizes = vec![ops.len()];
    loop {
        let round_pairs = |&i: &usize| -> Vec<(usize, usize)> {
            let op = &ops[i];
            let mut pairs = Vec::new();
            let mut cands = Vec::new();
            if op.is_decreasing() {
                ups.comparable(&op.pop, &mut cands);
                pairs.extend(cands.drain(..).map(|u| (i, u)));
            }
            if op.is_increasing() {
                downs.comparable(&op.push, &mut cands);
                pairs.extend(cands.drain(..).map(|d| (d, i)));
            }
            pairs
        };
        let pairs: Vec<(usize, usize)> = if frontier.len() >= PARALLEL_ROUND {
            frontier.par_iter().flat_map_iter(round_pairs).collect()
        } else {
            frontier.iter().flat_map(round_pairs).collect()
        };
        let mut next = Vec::new();
        for (d, u) in pairs {
            let p = ops[d].product(&ops[u]).expect("index only yields comparable pairs");
            if seen.contains_key(&p) {
                continue;
            }
            let id = ops.len();
            seen.insert(p.clone(), id);
            ops.push(p);
            origins.push(Origin::Product(d, u));
            next.push(id);
        }
        if next.is_empty() {
            break;
        }
        rounds += 1;
        for &i in &next {
            index_op(&ops[i], i, &mut downs, &mut ups);
        }
        sizes.push(ops.len());
        frontier = next;
    }
    Saturation {
        ops,
        origins,
        rounds,
        sizes,
    }
}

fn index_op(op: &StackOp, id: usize, downs: &mut PrefixIndex, ups: &mut PrefixIndex) {
    if op.is_decreasing() {
        downs.insert(&op.pop, id);
    }
    if op.is_increasing() {
        ups.insert(&op.push, id);
    }
}

/// `sat(F)`.
pub fn saturate(f: &StackWiring) -> StackWiring {
    saturate_traced(f).wiring()
}

/// `(Sʰ + ⋯ + 1)²`, the number of stack ops of height at most `h` over `S`
/// symbols, saturating at `u128::MAX`.
pub fn saturation_bound(symbols: usize, height: usize) -> u128 {
    let s = symbols as u128;
    let mut sum: u128 = 0;
    let mut pow: u128 = 1;
    for i in 0..=height {
        sum = sum.saturating_add(pow);
        if i < height {
            pow = pow.saturating_mul(s);
        }
    }
    sum.saturating_mul(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_wiring;
    use crate::semiring::flow_product;

    fn sw(text: &str) -> StackWiring {
        StackWiring::from_wiring(&parse_wiring(text).unwrap()).unwrap()
    }

    #[test]
    fn split_examples() {
        let (up, down) = split(&sw("f(X) <- X\nX <- f(X)"));
        assert_eq!(up, sw("f(X) <- X"));
        assert_eq!(down, sw("X <- f(X)"));
        let f = sw("f(X) <- g(X)");
        assert_eq!(split(&f), (f.clone(), f));
        assert_eq!(split(&StackWiring::zero()), (StackWiring::zero(), StackWiring::zero()));
    }

    #[test]
    fn shortcut_examples() {
        let f = sw("X <- f(X)\nf(X) <- X");
        assert_eq!(shortcut(&f), f.sum(&sw("X <- X")));
        let g = sw("f(X) <- g(X)");
        assert_eq!(shortcut(&g), g);
        assert!(shortcut(&StackWiring::zero()).is_empty());
    }

    #[test]
    fn saturate_examples() {
        let f = sw("X <- f(X)\nf(X) <- X");
        assert_eq!(saturate(&f), f.sum(&sw("X <- X")));
        // Both ops are height-neutral, so they sit in both splits and
        // compose.
        let g = sw("f(X) <- g(X)\ng(X) <- h(X)");
        assert_eq!(saturate(&g), g.sum(&sw("f(X) <- h(X)")));
        assert!(saturate(&StackWiring::zero()).is_empty());
    }

    #[test]
    fn product_agrees_with_unification() {
        let ops = sw("f(g(X)) <- X\nX <- f(X)\ng(X) <- f(g(X))\nf(X) <- f(X)\nX <- X");
        for a in &ops {
            for b in &ops {
                let fast = a.product(b).map(|o| o.to_flow());
                assert_eq!(fast, flow_product(&a.to_flow(), &b.to_flow()), "{a} * {b}");
            }
        }
    }

    #[test]
    fn witnesses_multiply_back() {
        let f = sw("f(X) <- g(X)\ng(g(X)) <- X\nX <- f(f(X))\nX <- g(X)");
        let sat = saturate_traced(&f);
        for op in sat.wiring().iter() {
            let seq = sat.witness(op, 1 << 12).unwrap();
            let prod = seq[1..].iter().try_fold(seq[0].clone(), |acc, o| acc.product(o));
            assert_eq!(prod.as_ref(), Some(op));
        }
        assert_eq!(sat.sizes.len(), sat.rounds + 1);
    }

    #[test]
    fn bound() {
        assert_eq!(saturation_bound(2, 2), 49);
        assert_eq!(saturation_bound(0, 3), 1);
        assert_eq!(saturation_bound(1000, 40), u128::MAX);
    }
}
