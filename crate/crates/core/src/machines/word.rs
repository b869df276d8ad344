use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::semiring::{Flow, Wiring};
use crate::symbol::Sym;
use crate::term::Term;

pub const LEFT: &str = "l";
pub const RIGHT: &str = "r";

pub fn left() -> Sym {
    Sym::constant(LEFT)
}

pub fn right() -> Sym {
    Sym::constant(RIGHT)
}

/// Canonical position constants `_pos0, _pos1, …`.
pub fn canonical_positions(n: usize) -> Vec<Sym> {
    positions_named("_pos", n)
}

pub fn positions_named(prefix: &str, n: usize) -> Vec<Sym> {
    (0..n).map(|i| Sym::constant(&format!("{prefix}{i}"))).collect()
}

/// Letters as constants named by the character.
pub fn word_symbols(word: &str) -> Vec<Sym> {
    word.chars().map(|c| Sym::constant(&c.to_string())).collect()
}

/// A word together with the position constants representing it.
#[derive(Debug, Clone)]
pub struct WordContext {
    pub word: Vec<Sym>,
    pub positions: Vec<Sym>,
}

impl WordContext {
    pub fn new(word: Vec<Sym>, positions: Vec<Sym>) -> Result<Self> {
        if positions.len() != word.len() + 1 {
            return Err(Error::WordRep(format!(
                "{} letters need {} positions, got {}",
                word.len(),
                word.len() + 1,
                positions.len()
            )));
        }
        let distinct: BTreeSet<_> = positions.iter().collect();
        if distinct.len() != positions.len() {
            return Err(Error::WordRep("position constants must be pairwise distinct".into()));
        }
        if let Some(p) = positions.iter().find(|p| p.arity() != 0) {
            return Err(Error::WordRep(format!("position `{p}` is not a constant")));
        }
        if let Some(c) = word.iter().find(|c| c.arity() != 0 || c.is_star() || positions.contains(c)) {
            return Err(Error::WordRep(format!("`{c}` cannot be a letter")));
        }
        Ok(WordContext { word, positions })
    }

    /// The word with canonical positions.
    pub fn canonical(word: &str) -> Result<Self> {
        let letters = word_symbols(word);
        let n = letters.len();
        WordContext::new(letters, canonical_positions(n + 1))
    }

    /// Cell `i` for `i ∈ 0..=n`; cell 0 (and the virtual cell `n+1`) holds `⋆`.
    pub fn cell(&self, i: usize) -> Sym {
        if i == 0 || i > self.word.len() {
            Sym::star()
        } else {
            self.word[i - 1]
        }
    }
}

/// `Σᵢ cᵢ•r•pᵢ ⇄ cᵢ₊₁•l•pᵢ₊₁` with `c₀ = cₙ₊₁ = ⋆`, `pₙ₊₁ = p₀`.
pub fn word_rep(ctx: &WordContext) -> Wiring {
    let n = ctx.word.len();
    let k = |s: Sym| Term::constant(s);
    let mut out = Wiring::zero();
    for i in 0..=n {
        let j = (i + 1) % (n + 1);
        let a = Term::bullets(vec![k(ctx.cell(i)), k(right()), k(ctx.positions[i])]);
        let b = Term::bullets(vec![k(ctx.cell(i + 1)), k(left()), k(ctx.positions[j])]);
        out.insert(Flow::new(a.clone(), b.clone()).expect("closed"));
        out.insert(Flow::new(b, a).expect("closed"));
    }
    out
}

/// Lifts each link `c•d•p ⊸ c'•d'•p'` to act on the main-pointer coordinate
/// of observation configurations:
/// `c•d•S•Q•A•h(p) ⊸ c'•d'•S•Q•A•h(p')`, one copy per head symbol `h`.
pub fn lifted_word_rep(ctx: &WordContext, head_syms: &BTreeSet<Sym>) -> Wiring {
    let rep = word_rep(ctx);
    let mut out = Wiring::zero();
    for &h in head_syms {
        for f in &rep {
            let lift = |t: &Term| {
                let parts = t.bullet_components(3).expect("word flows have three components");
                Term::bullets(vec![
                    parts[0].clone(),
                    parts[1].clone(),
                    Term::var(0),
                    Term::var(1),
                    Term::var(2),
                    Term::app(h, vec![parts[2].clone()]),
                ])
            };
            out.insert(Flow::new(lift(f.head()), lift(f.body())).expect("shared variables"));
        }
    }
    out
}
