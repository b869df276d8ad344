use crate::symbol::Sym;

use super::{StackOp, StackWiring};

/// Marker prefix that no symbol of `f` starts with.
fn fresh_prefix(f: &StackWiring) -> String {
    let names: Vec<_> = f.symbols().into_iter().map(Sym::name).collect();
    let mut prefix = String::from("_fl");
    while names.iter().any(|n| n.starts_with(&prefix)) {
        prefix.push('_');
    }
    prefix
}

/// Rewrites every op `f1…fm(x) ⊸ g1…gn(x)` into a chain of height at most 2
/// that pops `g1…gn` one by one under markers `Q`, switches to markers `P`,
/// and pushes `fm…f1`. The chain has `n + m + 1` ops and size `3(n + m)`;
/// markers are fresh for each op, so chains cannot interleave.
pub fn flatten(f: &StackWiring) -> StackWiring {
    let prefix = fresh_prefix(f);
    let mut out = StackWiring::zero();
    for (k, op) in f.iter().enumerate() {
        for piece in flatten_op(op, &format!("{prefix}{k}")) {
            out.insert(piece);
        }
    }
    out
}

fn flatten_op(op: &StackOp, tag: &str) -> Vec<StackOp> {
    let (fs, gs) = (op.push(), op.pop());
    let (m, n) = (fs.len(), gs.len());
    if m == 0 && n == 0 {
        return vec![op.clone()];
    }
    let q = |j: usize| Sym::unary(&format!("{tag}q{j}"));
    let p = |j: usize| Sym::unary(&format!("{tag}p{j}"));
    let mk = StackOp::new_unchecked;
    let mut chain = Vec::with_capacity(n + m + 1);
    // Listed in product order, from the head side to the body side.
    if m > 0 {
        chain.push(mk(vec![fs[0]], vec![p(m)]));
        for j in (1..m).rev() {
            chain.push(mk(vec![p(j + 1), fs[m - j]], vec![p(j)]));
        }
    }
    match (m > 0, n > 0) {
        (true, true) => chain.push(mk(vec![p(1)], vec![q(n)])),
        (true, false) => chain.push(mk(vec![p(1)], vec![])),
        (false, true) => chain.push(mk(vec![], vec![q(n)])),
        (false, false) => unreachable!(),
    }
    if n > 0 {
        for j in (2..=n).rev() {
            chain.push(mk(vec![q(j)], vec![q(j - 1), gs[j - 1]]));
        }
        chain.push(mk(vec![q(1)], vec![gs[0]]));
    }
    chain
}
