use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::semiring::{Flow, Wiring};
use crate::symbol::Sym;
use crate::term::Term;

use super::{flatten, saturate, split, StackOp, StackWiring};

/// How [`incr_nilpotent_with`] decides the increasing case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncrMethod {
    /// Explicit when `Sʰ` fits the budget, lazy otherwise.
    Auto,
    /// Build `T·F` and search its successor graph for a cycle.
    Explicit,
    /// Explore windows of the top `h` cells, unknown cells left open.
    Lazy,
}

#[derive(Debug, Clone, Copy)]
pub struct StackConfig {
    /// Wirings higher than this are flattened before saturation.
    pub flatten_threshold: usize,
    /// Largest truncation wiring built explicitly.
    pub truncation_budget: u128,
    pub method: IncrMethod,
}

impl Default for StackConfig {
    fn default() -> Self {
        StackConfig {
            flatten_threshold: 8,
            truncation_budget: 1 << 16,
            method: IncrMethod::Auto,
        }
    }
}

fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

fn sequences(h: usize, symbols: &[Sym]) -> Vec<Vec<Sym>> {
    let mut out = vec![Vec::new()];
    for _ in 0..h {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                symbols.iter().map(move |&s| {
                    let mut next = prefix.clone();
                    next.push(s);
                    next
                })
            })
            .collect();
    }
    out
}

/// `T_{h,S} = Σ τ(⋆) ⊸ τ(x)` over sequences `τ` of length `h`.
pub fn truncation(h: usize, symbols: &BTreeSet<Sym>, budget: u128) -> Result<Wiring> {
    assert!(h >= 1, "truncation height must be positive");
    if let Some(s) = symbols.iter().find(|s| s.arity() != 1) {
        return Err(Error::NotUnary(format!("symbol `{s}` has arity {}", s.arity())));
    }
    let needed = checked_pow(symbols.len(), h);
    if needed > budget {
        return Err(Error::Budget {
            what: "truncation wiring",
            needed,
            budget,
        });
    }
    let syms: Vec<Sym> = symbols.iter().copied().collect();
    Ok(sequences(h, &syms)
        .into_iter()
        .map(|tau| {
            Flow::new(Term::unary_chain(&tau, Term::star()), Term::unary_chain(&tau, Term::var(0)))
                .expect("closed head")
        })
        .collect())
}

/// Nilpotency of a wiring that is entirely increasing or entirely
/// decreasing.
pub fn incr_nilpotent(f: &StackWiring) -> Result<bool> {
    incr_nilpotent_with(f, &StackConfig::default())
}

pub fn incr_nilpotent_with(f: &StackWiring, cfg: &StackConfig) -> Result<bool> {
    let f = if f.is_increasing() {
        f.clone()
    } else if f.is_decreasing() {
        f.dagger()
    } else {
        let witness = f.iter().find(|o| o.is_increasing()).unwrap();
        let other = f.iter().find(|o| o.is_decreasing()).unwrap();
        return Err(Error::precondition(
            "increasing or decreasing",
            format!("mixes `{witness}` and `{other}`"),
        ));
    };
    if f.is_empty() {
        return Ok(true);
    }
    let h = f.height();
    if h == 0 {
        // Only the identity has height 0.
        return Ok(false);
    }
    let symbols = f.symbols();
    let explicit = match cfg.method {
        IncrMethod::Explicit => true,
        IncrMethod::Lazy => false,
        IncrMethod::Auto => checked_pow(symbols.len(), h) <= cfg.truncation_budget,
    };
    if explicit {
        explicit_nilpotent(&f, h, &symbols, cfg.truncation_budget)
    } else {
        Ok(lazy_nilpotent(&f, h))
    }
}

/// Builds `T·F`, whose elements have closed heads `τ(⋆)` with `|τ| = h` and
/// bodies `β(x)` with `|β| ≤ h`. `g₁g₂ ≠ 0` iff `β₁` is a prefix of `τ₂`, so
/// `T·F` is nilpotent iff this successor graph is acyclic.
fn explicit_nilpotent(f: &StackWiring, h: usize, symbols: &BTreeSet<Sym>, budget: u128) -> Result<bool> {
    let t = truncation(h, symbols, budget)?;
    let tf = t.product(&f.to_wiring());
    let nodes: Vec<(Vec<Sym>, Vec<Sym>)> = tf
        .iter()
        .map(|g| {
            let (head, _) = g.head().unary_prefix();
            let (body, _) = g.body().as_unary_chain().expect("unary body");
            (head, body)
        })
        .collect();
    let mut by_head: Vec<(Vec<Sym>, usize)> = nodes.iter().enumerate().map(|(i, (hd, _))| (hd.clone(), i)).collect();
    by_head.sort();
    let succ = |i: usize| -> Vec<usize> {
        let body = &nodes[i].1;
        let start = by_head.partition_point(|(k, _)| k.as_slice() < body.as_slice());
        by_head[start..]
            .iter()
            .take_while(|(k, _)| k.starts_with(body))
            .map(|&(_, j)| j)
            .collect()
    };
    Ok(!has_cycle(nodes.len(), (0..nodes.len()).collect(), succ))
}

/// Iterative three-colour DFS from `roots`.
fn has_cycle(n: usize, roots: Vec<usize>, succ: impl Fn(usize) -> Vec<usize>) -> bool {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let mut colour = vec![WHITE; n];
    for root in roots {
        if colour[root] != WHITE {
            continue;
        }
        colour[root] = GREY;
        let mut stack = vec![(root, succ(root), 0usize)];
        while let Some((node, next, pos)) = stack.last_mut() {
            if *pos == next.len() {
                colour[*node] = BLACK;
                stack.pop();
                continue;
            }
            let m = next[*pos];
            *pos += 1;
            match colour[m] {
                GREY => return true,
                WHITE => {
                    colour[m] = GREY;
                    let s = succ(m);
                    stack.push((m, s, 0));
                }
                _ => {}
            }
        }
    }
    false
}

/// A window cell: a known symbol or an untouched cell of the unknown stack.
type Cell = Option<Sym>;

/// Explores the top `h` cells of the stack, starting from a window of
/// unknown cells. An op `(ρ, χ)` reads `ρ` (unknown cells match anything)
/// and writes `χ`; since `|χ| ≤ |ρ|` the window never grows, and every
/// unknown cell read is overwritten, so distinct reads never constrain the
/// same cell twice. `F` is nilpotent iff no cycle is reachable.
fn lazy_nilpotent(f: &StackWiring, h: usize) -> bool {
    let ops: Vec<&StackOp> = f.iter().collect();
    let mut ids: HashMap<Vec<Cell>, usize> = HashMap::new();
    let mut windows: Vec<Vec<Cell>> = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let start = vec![None; h];
    ids.insert(start.clone(), 0);
    windows.push(start);
    let mut i = 0;
    while i < windows.len() {
        let w = windows[i].clone();
        let mut out = Vec::new();
        for op in &ops {
            let rho = op.push();
            let fits = rho.iter().zip(&w).all(|(s, c)| c.is_none_or(|c| c == *s));
            if !fits {
                continue;
            }
            let mut next: Vec<Cell> = op.pop().iter().map(|&s| Some(s)).collect();
            next.extend_from_slice(&w[rho.len()..]);
            next.resize(h, None);
            let id = *ids.entry(next.clone()).or_insert_with(|| {
                windows.push(next);
                windows.len() - 1
            });
            out.push(id);
        }
        out.sort_unstable();
        out.dedup();
        edges.push(out);
        i += 1;
    }
    !has_cycle(windows.len(), vec![0], |n| edges[n].clone())
}

/// Nilpotency of an arbitrary stack wiring.
pub fn stack_nilpotent(f: &StackWiring) -> bool {
    stack_nilpotent_with(f, &StackConfig::default())
}

pub fn stack_nilpotent_with(f: &StackWiring, cfg: &StackConfig) -> bool {
    let flattened;
    let f = if f.height() > cfg.flatten_threshold {
        flattened = flatten(f);
        &flattened
    } else {
        f
    };
    let sat = saturate(f);
    let (up, down) = split(&sat);
    let cfg = StackConfig {
        method: if cfg.method == IncrMethod::Explicit {
            IncrMethod::Auto
        } else {
            cfg.method
        },
        ..*cfg
    };
    incr_nilpotent_with(&up, &cfg).expect("increasing part") && incr_nilpotent_with(&down, &cfg).expect("decreasing part")
}
