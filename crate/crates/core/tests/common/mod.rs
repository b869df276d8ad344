#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use resring::machines::{ObsFlow, ObsSide, Observation};
use std::collections::HashSet;

use resring::{StackOp, StackWiring, Sym, Term, UnaryQuery, Var};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(n: usize) -> Vec<Sym> {
    (0..n).map(|i| Sym::unary(&format!("s{i}"))).collect()
}

pub fn random_seq(rng: &mut impl Rng, syms: &[Sym], max_len: usize) -> Vec<Sym> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| *syms.choose(rng).unwrap()).collect()
}

pub fn random_op(rng: &mut impl Rng, syms: &[Sym], max_height: usize) -> StackOp {
    StackOp::new(random_seq(rng, syms, max_height), random_seq(rng, syms, max_height)).unwrap()
}

pub fn random_stack_wiring(rng: &mut impl Rng, syms: &[Sym], max_height: usize, max_card: usize) -> StackWiring {
    let card = rng.gen_range(1..=max_card);
    (0..card).map(|_| random_op(rng, syms, max_height)).collect()
}

/// Random wiring without the identity, which is trivially cyclic.
pub fn random_nontrivial(rng: &mut impl Rng, syms: &[Sym], max_height: usize, max_card: usize) -> StackWiring {
    loop {
        let w = random_stack_wiring(rng, syms, max_height, max_card);
        if !w.contains(&StackOp::identity()) {
            return w;
        }
    }
}

fn random_side(rng: &mut impl Rng, swap: bool, max_stack: usize) -> ObsSide {
    let cells = [Sym::constant("a"), Sym::constant("b"), Sym::star()];
    let dirs = [Sym::constant("l"), Sym::constant("r")];
    let stack = [Sym::unary("s"), Sym::unary("t")];
    let controls = [Sym::constant("q0")];
    let (y, z) = (Var(1), Var(2));
    ObsSide {
        cell: *cells.choose(rng).unwrap(),
        dir: *dirs.choose(rng).unwrap(),
        stack: random_seq(rng, &stack, max_stack),
        control: *controls.choose(rng).unwrap(),
        aux: Sym::intern("aux", 1),
        aux_args: vec![if swap { z } else { y }],
        head: Sym::unary("head"),
        head_arg: if swap { y } else { z },
    }
}

/// Random balanced observation with two pointers over the letters `a`, `b`.
/// Heads may swap the pointers, which changes the main one.
pub fn random_observation(rng: &mut impl Rng, max_flows: usize) -> Observation {
    let n = rng.gen_range(1..=max_flows);
    let flows = (0..n)
        .map(|_| {
            let swap = rng.gen_bool(0.25);
            ObsFlow {
                body: random_side(rng, false, 1),
                head: random_side(rng, swap, 1),
                stack_var: Var(0),
            }
        })
        .collect();
    Observation::from_flows(flows).unwrap()
}

pub fn random_word(rng: &mut impl Rng, max_len: usize) -> String {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' }).collect()
}

/// All words over `a`, `b` up to the given length.
pub fn words_up_to(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        layer = layer.iter().flat_map(|w| ["a", "b"].map(|c| format!("{w}{c}"))).collect();
        out.extend(layer.clone());
    }
    out
}

/// Exact derivability for unary queries, independent of the saturation:
/// facts read from the top form a regular set closed under the prefix
/// rewriting `σμ → τμ` of each rule `τ ⊸ σ`, computed as a finite
/// automaton grown until stable.
pub fn derivable(q: &UnaryQuery) -> bool {
    let word = |t: &Term| {
        let (mut seq, base) = t.unary_prefix();
        let Term::App(c, _) = base else { unreachable!() };
        seq.push(*c);
        seq
    };
    let mut trans: Vec<HashSet<(Sym, usize)>> = vec![HashSet::new()];
    let mut eps: HashSet<usize> = HashSet::new();
    let mut finals = HashSet::new();
    let add_state = |trans: &mut Vec<HashSet<(Sym, usize)>>| {
        trans.push(HashSet::new());
        trans.len() - 1
    };
    for t in &q.data {
        let mut s = 0;
        for sym in word(t) {
            let next = add_state(&mut trans);
            trans[s].insert((sym, next));
            s = next;
        }
        finals.insert(s);
    }
    // For each rule, the state its push reaches before the last symbol.
    let rules: Vec<(Vec<Sym>, Vec<Sym>, usize)> = q
        .program
        .iter()
        .map(|op| {
            let push = op.push().to_vec();
            let mut s = 0;
            for &sym in push.iter().take(push.len().saturating_sub(1)) {
                let next = add_state(&mut trans);
                trans[s].insert((sym, next));
                s = next;
            }
            (push, op.pop().to_vec(), s)
        })
        .collect();
    let closure = |set: HashSet<usize>, eps: &HashSet<usize>| -> HashSet<usize> {
        let mut set = set;
        if set.contains(&0) {
            set.extend(eps.iter().copied());
        }
        set
    };
    let run = |w: &[Sym], trans: &Vec<HashSet<(Sym, usize)>>, eps: &HashSet<usize>| {
        let mut cur = closure([0].into(), eps);
        for &sym in w {
            let next = cur.iter().flat_map(|&s| trans[s].iter().filter(|(a, _)| *a == sym).map(|&(_, t)| t)).collect();
            cur = closure(next, eps);
        }
        cur
    };
    loop {
        let mut changed = false;
        for (push, pop, last) in &rules {
            for s in run(pop, &trans, &eps) {
                changed |= match push.last() {
                    None => eps.insert(s),
                    Some(&sym) => trans[*last].insert((sym, s)),
                };
            }
        }
        if !changed {
            break;
        }
    }
    run(&word(&q.goal), &trans, &eps).iter().any(|s| finals.contains(s))
}
