use std::collections::BTreeSet;

use proptest::prelude::*;
use resring::machines::word::{word_rep, WordContext};
use resring::parse::parse_term;
use resring::semiring::naive_nilpotency;
use resring::term::matchable;
use resring::{unify, Flow, NaiveVerdict, Substitution, Sym, Term, Var, Wiring};

fn term(max_var: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..max_var).prop_map(Term::var),
        Just(Term::constant(Sym::constant("a"))),
        Just(Term::constant(Sym::constant("b"))),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app(Sym::unary("g"), vec![t])),
            (inner.clone(), inner.clone()).prop_map(|(t, u)| Term::app(Sym::intern("f", 2), vec![t, u])),
            (inner.clone(), inner).prop_map(|(t, u)| Term::bullet(t, u)),
        ]
    })
}

/// Replaces variables of the head missing from the body by a constant.
fn flow_from(head: Term, body: Term) -> Flow {
    let vars = body.vars();
    let fixed = Substitution::from_bindings(
        head.vars()
            .into_iter()
            .filter(|v| !vars.contains(v))
            .map(|v| (v, Term::constant(Sym::constant("a")))),
    );
    Flow::new(fixed.apply(&head), body).unwrap()
}

fn flow() -> impl Strategy<Value = Flow> {
    (term(3), term(3)).prop_map(|(h, b)| flow_from(h, b))
}

fn wiring() -> impl Strategy<Value = Wiring> {
    prop::collection::vec(flow(), 0..4).prop_map(|v| v.into_iter().collect())
}

/// Replaces some subterms of `t` by fresh variables, recording what they
/// stood for.
fn generalize(t: &Term, picks: &mut impl Iterator<Item = bool>, next: &mut u32, sigma: &mut Vec<(Var, Term)>) -> Term {
    if picks.next().unwrap_or(false) {
        let v = Var(*next);
        *next += 1;
        sigma.push((v, t.clone()));
        return Term::Var(v);
    }
    match t {
        Term::Var(_) => t.clone(),
        Term::App(s, args) => Term::App(*s, args.iter().map(|a| generalize(a, picks, next, sigma)).collect()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn unifiers_are_idempotent_solutions(t in term(3), u in term(3)) {
        if let Some(theta) = unify(&t, &u) {
            prop_assert_eq!(theta.apply(&t), theta.apply(&u));
            prop_assert!(theta.is_idempotent());
        }
        prop_assert_eq!(unify(&t, &u).is_some(), unify(&u, &t).is_some());
    }

    #[test]
    fn unifiers_are_most_general(t in term(3), picks in prop::collection::vec(any::<bool>(), 32)) {
        // `sigma` unifies `t` with its generalization `u`; it must factor
        // through the computed unifier.
        let mut sigma = Vec::new();
        let u = generalize(&t, &mut picks.into_iter(), &mut 100, &mut sigma);
        let sigma = Substitution::from_bindings(sigma);
        prop_assert_eq!(sigma.apply(&u), sigma.apply(&t));
        let theta = unify(&t, &u).expect("a unifier exists");
        let mut vars: BTreeSet<Var> = t.vars();
        vars.extend(u.vars());
        for v in vars {
            let x = Term::Var(v);
            prop_assert_eq!(sigma.apply(&theta.apply(&x)), sigma.apply(&x));
        }
    }

    #[test]
    fn print_parse_round_trip(t in term(3)) {
        let canonical = t.canonical();
        prop_assert_eq!(parse_term(&canonical.to_string()).unwrap(), canonical);
    }

    #[test]
    fn matchable_is_symmetric(t in term(3), u in term(3)) {
        prop_assert_eq!(matchable(&t, &u), matchable(&u, &t));
        if !t.vars().is_empty() {
            prop_assert!(matchable(&t, &t));
        }
    }

    #[test]
    fn product_is_associative(a in wiring(), b in wiring(), c in wiring()) {
        prop_assert_eq!(a.product(&b).product(&c), a.product(&b.product(&c)));
    }

    #[test]
    fn product_distributes(a in wiring(), b in wiring(), c in wiring()) {
        prop_assert_eq!(a.product(&b.sum(&c)), a.product(&b).sum(&a.product(&c)));
        prop_assert_eq!(b.sum(&c).product(&a), b.product(&a).sum(&c.product(&a)));
    }

    #[test]
    fn zero_and_unit(a in wiring()) {
        prop_assert!(a.product(&Wiring::zero()).is_empty());
        prop_assert!(Wiring::zero().product(&a).is_empty());
        prop_assert_eq!(a.product(&Wiring::unit()), a.clone());
        prop_assert_eq!(Wiring::unit().product(&a), a);
    }

    #[test]
    fn product_ignores_renaming(f in flow(), g in flow()) {
        let shifted = Flow::new(f.head().shift_vars(7), f.body().shift_vars(7)).unwrap();
        prop_assert_eq!(resring::flow_product(&shifted, &g), resring::flow_product(&f, &g));
        if let Some(p) = resring::flow_product(&f, &g) {
            prop_assert!(p.head().vars().is_subset(&p.body().vars()));
        }
    }

    #[test]
    fn mixed_tensor_law(f in wiring(), g in wiring(), f2 in wiring(), g2 in wiring()) {
        prop_assert_eq!(f.tensor(&g).product(&f2.tensor(&g2)), f.product(&f2).tensor(&g.product(&g2)));
    }

    #[test]
    fn naive_nilpotency_rechecks(a in wiring()) {
        if let NaiveVerdict::Nilpotent(n) = naive_nilpotency(&a, 12) {
            prop_assert!(a.power(n).is_empty());
            if n > 1 {
                prop_assert!(!a.power(n - 1).is_empty());
            }
        }
    }

    #[test]
    fn word_rep_uses_each_position_four_times(word in "[ab]{0,5}") {
        let ctx = WordContext::canonical(&word).unwrap();
        let rep = word_rep(&ctx);
        prop_assert!(rep.iter().all(|f| f.head().is_closed() && f.body().is_closed()));
        for &p in &ctx.positions {
            let mut slots = 0;
            for f in &rep {
                for side in [f.head(), f.body()] {
                    side.visit_syms(&mut |s| slots += (s == p) as usize);
                }
            }
            prop_assert_eq!(slots, 4, "{}", p);
        }
    }
}
