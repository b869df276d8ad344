use std::collections::HashMap;

use crate::error::Result;
use crate::semiring::{naive_nilpotency_bounded, wiring_product, NaiveVerdict, Wiring};
use crate::stack::{stack_nilpotent_with, StackConfig, StackOp, StackWiring};
use crate::symbol::Sym;
use crate::term::{Substitution, Term, Var};

use super::observation::Observation;
use super::word::{lifted_word_rep, WordContext};

/// `O · W̃`, where `W̃` is the word representation lifted to act on the
/// main pointer of observation configurations.
pub fn interaction(o: &Observation, ctx: &WordContext) -> Wiring {
    let lifted = lifted_word_rep(ctx, &o.head_symbols());
    wiring_product(o.wiring(), &lifted)
}

/// Splits `c•d•σ(x)•q•a•h` into its balanced part `[c, d, q, a, h]` and the
/// stack chain `σ`.
fn split_config(t: &Term) -> (Vec<Term>, Vec<Sym>) {
    let parts = t.bullet_components(6).expect("observation shape");
    let (stack, _) = parts[2].as_unary_chain().expect("unary stack");
    let balanced = [0, 1, 3, 4, 5].iter().map(|&i| parts[i].clone()).collect();
    (balanced, stack)
}

fn assignments(vars: &[Var], values: &[Sym]) -> Vec<Substitution> {
    let mut out = vec![Vec::new()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<(Var, Term)>| {
                values.iter().map(move |&p| {
                    let mut next = prefix.clone();
                    next.push((v, Term::constant(p)));
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(Substitution::from_bindings).collect()
}

/// Turns `O · W̄_p` into a stack wiring: pointer variables are instantiated
/// by every position, and each closed balanced part becomes a fresh unary
/// symbol on top of the stack, giving `t̂(σ(x)) ⊸ û(σ'(x))`.
pub fn reduce_with(o: &Observation, ctx: &WordContext) -> StackWiring {
    let ow = interaction(o, ctx);
    let mut names: HashMap<Vec<Term>, Sym> = HashMap::new();
    let mut intern = |key: Vec<Term>| -> Sym {
        let next = names.len();
        *names.entry(key).or_insert_with(|| Sym::unary(&format!("_c{next}")))
    };
    let mut out = StackWiring::zero();
    for f in &ow {
        let parts = f.body().bullet_components(6).expect("observation shape");
        let (_, x) = parts[2].as_unary_chain().expect("unary stack");
        let pointers: Vec<Var> = f.body().vars().into_iter().filter(|&v| v != x).collect();
        for theta in assignments(&pointers, &ctx.positions) {
            let (hb, hs) = split_config(&theta.apply(f.head()));
            let (bb, bs) = split_config(&theta.apply(f.body()));
            let mut push = vec![intern(hb)];
            push.extend(hs);
            let mut pop = vec![intern(bb)];
            pop.extend(bs);
            out.insert(StackOp::new(push, pop).expect("unary"));
        }
    }
    out
}

pub fn reduce(o: &Observation, word: &str) -> Result<StackWiring> {
    Ok(reduce_with(o, &WordContext::canonical(word)?))
}

pub fn accepts_with(o: &Observation, ctx: &WordContext, cfg: &StackConfig) -> bool {
    stack_nilpotent_with(&reduce_with(o, ctx), cfg)
}

/// `W ∈ L(O)`, decided on the canonical representation of `W`.
pub fn accepts(o: &Observation, word: &str) -> Result<bool> {
    Ok(accepts_with(o, &WordContext::canonical(word)?, &StackConfig::default()))
}

/// Iterates powers of `O · W̄_p` directly. Only a vanishing power is
/// conclusive; anything else is reported as it stands.
pub fn naive_interaction(o: &Observation, ctx: &WordContext, max_iter: usize, max_elements: usize) -> NaiveVerdict {
    naive_nilpotency_bounded(&interaction(o, ctx), max_iter, max_elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::observation::validate_observation;
    use crate::parse::parse_wiring;

    fn obs(text: &str) -> Observation {
        validate_observation(&parse_wiring(text).unwrap()).unwrap()
    }

    #[test]
    fn zero_accepts_everything() {
        let o = obs("");
        assert!(reduce(&o, "ab").unwrap().is_empty());
        assert!(accepts(&o, "").unwrap());
        assert!(accepts(&o, "abba").unwrap());
    }

    #[test]
    fn bouncing_pointer_loops() {
        // Turns around at every cell without touching the stack.
        let o = obs(
            "a . r . X . q . aux . head(Z) <- a . l . X . q . aux . head(Z)
             a . l . X . q . aux . head(Z) <- a . r . X . q . aux . head(Z)
             star . r . X . q . aux . head(Z) <- star . l . X . q . aux . head(Z)
             star . l . X . q . aux . head(Z) <- star . r . X . q . aux . head(Z)",
        );
        assert!(!accepts(&o, "a").unwrap());
    }

    #[test]
    fn popping_walk_is_nilpotent_and_agrees() {
        // Walks right popping one `s` per step.
        let text = "a . l . X . q . aux . head(Z) <- a . l . s(X) . q . aux . head(Z)
                    star . l . X . q . aux . head(Z) <- star . l . s(X) . q . aux . head(Z)";
        let o = obs(text);
        let ctx = WordContext::canonical("aa").unwrap();
        let naive = naive_interaction(&o, &ctx, 50, 10_000);
        let reduced = accepts_with(&o, &ctx, &StackConfig::default());
        assert_eq!(reduced, naive.is_nilpotent(), "{naive:?}");
    }
}
