//! Automata as balanced observations with stack.
//!
//! A configuration is the closed term
//! `c • d • τ(⊡) • q • aux(p…) • head(p)` where `head` holds the position of
//! the main pointer, `aux` those of the other heads in increasing head order,
//! `c • d` is what the main pointer sees after its last move (the letter and
//! the side it came from, which tells `▷` from `◁` on the `⋆` cell), and `q`
//! is a control constant recording the automaton state, the phase, the index
//! of the main head and the letters under the other heads.
//!
//! The word moves the main pointer after every step of the observation, so
//! transitions that move no head become a move away and back, and moving
//! another head first makes it the main one. Entering a reject state pushes
//! a fresh bottom marker, walks every head back to `▷` and restarts from the
//! initial state, so that the computation loops instead of halting.
//!
//! The encoding is faithful when, outside reject states, `M` has no
//! arbitrarily long runs from any configuration, including configurations
//! where heads that do not move read arbitrary letters and the stack is
//! arbitrary; in particular when every transition not entering a reject
//! state moves a head forward.

use std::collections::{BTreeSet, HashMap};

use crate::error::Result;
use crate::semiring::Flow;
use crate::symbol::Sym;
use crate::term::{Term, Var};

use super::automaton::{Automaton, Letter, StackAction, Top};
use super::observation::{validate_observation, Observation};
use super::word::{left, right};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Phase {
    /// Read the main head from the arrival and fire a transition.
    Apply { state: usize, tracked: Vec<Letter>, main: usize },
    /// Move the main head back, then apply.
    Wiggle { state: usize, tracked: Vec<Letter>, main: usize, back_left: bool },
    /// Walk head `main` left to `▷`, then the following heads.
    Reset { tracked: Vec<Letter>, main: usize },
}

fn normalize(mut tracked: Vec<Letter>, main: usize) -> Vec<Letter> {
    tracked[main] = Letter::Begin;
    tracked
}

struct Encoder<'a> {
    m: &'a Automaton,
    controls: HashMap<Phase, Sym>,
    pending: Vec<Phase>,
    seen: BTreeSet<Phase>,
    flows: Vec<Flow>,
    aux: Sym,
    head: Sym,
}

fn cell(l: Letter) -> Sym {
    match l {
        Letter::Begin | Letter::End => Sym::star(),
        Letter::Char(c) => Sym::constant(&c.to_string()),
    }
}

/// Arrivals `(c, d)` under which the main head reads `l`.
fn arrivals(l: Letter) -> Vec<(Sym, Sym)> {
    match l {
        Letter::Begin => vec![(Sym::star(), right())],
        Letter::End => vec![(Sym::star(), left())],
        Letter::Char(_) => vec![(cell(l), left()), (cell(l), right())],
    }
}

const X: Var = Var(0);

fn ptr(j: usize) -> Term {
    Term::Var(Var(j as u32 + 1))
}

fn stack_sym(m: &Automaton, t: Top) -> Sym {
    match t {
        Top::Bottom => Sym::unary("bottom"),
        Top::Sym(i) => Sym::unary(&format!("b_{}", m.stack[i])),
    }
}

impl Encoder<'_> {
    fn control(&mut self, p: Phase) -> Sym {
        if self.seen.insert(p.clone()) {
            self.pending.push(p.clone());
        }
        let next = self.controls.len();
        *self.controls.entry(p).or_insert_with(|| Sym::constant(&format!("ctl{next}")))
    }

    fn config(&self, c: Sym, d: Sym, stack: Term, q: Sym, main: usize) -> Term {
        let others = (0..self.m.heads).filter(|&j| j != main).map(ptr).collect();
        Term::bullets(vec![
            Term::constant(c),
            Term::constant(d),
            stack,
            Term::constant(q),
            Term::app(self.aux, others),
            Term::app(self.head, vec![ptr(main)]),
        ])
    }

    fn emit(&mut self, head: Term, body: Term) {
        self.flows.push(Flow::new(head, body).expect("pointer variables are shared"));
    }

    fn letters(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = self.m.input.iter().map(|&c| cell(Letter::Char(c))).collect();
        out.push(Sym::star());
        out
    }

    fn wiggle_then_apply(&mut self, state: usize, tracked: Vec<Letter>, main: usize, at: Letter) -> (Sym, Sym) {
        let away_left = at == Letter::End;
        let q = self.control(Phase::Wiggle {
            state,
            tracked: normalize(tracked, main),
            main,
            back_left: !away_left,
        });
        (if away_left { left() } else { right() }, q)
    }

    fn apply_flows(&mut self) {
        let m = self.m;
        for t in &m.transitions {
            if m.is_reject(t.from) {
                continue;
            }
            for main in 0..m.heads {
                let tracked = normalize(t.read.clone(), main);
                let key = Phase::Apply {
                    state: t.from,
                    tracked: tracked.clone(),
                    main,
                };
                let b = Term::app(stack_sym(m, t.top), vec![Term::Var(X)]);
                for (c, d) in arrivals(t.read[main]) {
                    let q = self.control(key.clone());
                    let body = self.config(c, d, b.clone(), q, main);
                    let head = if m.is_reject(t.to) {
                        let pushed = Term::app(stack_sym(m, Top::Bottom), vec![b.clone()]);
                        let q0 = self.control(Phase::Reset {
                            tracked: normalize(t.read.clone(), 0),
                            main: 0,
                        });
                        self.config(cell(t.read[0]), left(), pushed, q0, 0)
                    } else {
                        let stack = match t.action {
                            StackAction::Pop => Term::Var(X),
                            StackAction::Push(e) => Term::app(stack_sym(m, Top::Sym(e)), vec![b.clone()]),
                        };
                        match t.mover() {
                            None => {
                                let (away, q2) = self.wiggle_then_apply(t.to, t.read.clone(), main, t.read[main]);
                                self.config(c, away, stack, q2, main)
                            }
                            Some((j, dir)) => {
                                let illegal = (t.read[j] == Letter::Begin && dir < 0) || (t.read[j] == Letter::End && dir > 0);
                                if illegal {
                                    continue;
                                }
                                let q2 = self.control(Phase::Apply {
                                    state: t.to,
                                    tracked: normalize(t.read.clone(), j),
                                    main: j,
                                });
                                let d2 = if dir < 0 { left() } else { right() };
                                self.config(cell(t.read[j]), d2, stack, q2, j)
                            }
                        }
                    };
                    self.emit(head, body);
                }
            }
        }
    }

    fn phase_flows(&mut self) {
        while let Some(p) = self.pending.pop() {
            match p.clone() {
                Phase::Apply { .. } => {}
                Phase::Wiggle {
                    state,
                    tracked,
                    main,
                    back_left,
                } => {
                    let q = self.control(p);
                    let q2 = self.control(Phase::Apply { state, tracked, main });
                    let back = if back_left { left() } else { right() };
                    for c in self.letters() {
                        for d in [left(), right()] {
                            let body = self.config(c, d, Term::Var(X), q, main);
                            let head = self.config(c, back, Term::Var(X), q2, main);
                            self.emit(head, body);
                        }
                    }
                }
                Phase::Reset { tracked, main } => {
                    let q = self.control(p);
                    for c in self.letters() {
                        for d in [left(), right()] {
                            let body = self.config(c, d, Term::Var(X), q, main);
                            let head = if c.is_star() && d == right() {
                                // Head `main` is back on `▷`.
                                let done = normalize(tracked.clone(), main);
                                if main + 1 < self.m.heads {
                                    let next = main + 1;
                                    let q2 = self.control(Phase::Reset {
                                        tracked: normalize(done.clone(), next),
                                        main: next,
                                    });
                                    self.config(cell(done[next]), left(), Term::Var(X), q2, next)
                                } else {
                                    let all = vec![Letter::Begin; self.m.heads];
                                    let (away, q2) = self.wiggle_then_apply(self.m.init, all, main, Letter::Begin);
                                    self.config(c, away, Term::Var(X), q2, main)
                                }
                            } else {
                                self.config(c, left(), Term::Var(X), q, main)
                            };
                            self.emit(head, body);
                        }
                    }
                }
            }
        }
    }
}

/// Encodes `M` as a balanced observation with stack.
pub fn encode_automaton(m: &Automaton) -> Result<Observation> {
    m.validate()?;
    let mut enc = Encoder {
        m,
        controls: HashMap::new(),
        pending: Vec::new(),
        seen: BTreeSet::new(),
        flows: Vec::new(),
        aux: Sym::intern("aux", m.heads - 1),
        head: Sym::unary("head"),
    };
    enc.apply_flows();
    enc.phase_flows();
    validate_observation(&enc.flows.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::automaton::parse_automaton;
    use crate::machines::reduce::accepts;
    use crate::parse::parse_flow;

    #[test]
    fn no_transitions_gives_zero() {
        let m = parse_automaton("states: q\ninit: q\ninput: a").unwrap();
        let o = encode_automaton(&m).unwrap();
        assert!(o.is_empty());
        assert!(accepts(&o, "aa").unwrap());
    }

    #[test]
    fn stack_coordinates() {
        let m = parse_automaton("states: q p\ninit: q\ninput: a\nstack: b c\ntrans:\n(q; a; b) -> (p; +1; pop)\n(p; a; b) -> (q; +1; push c)").unwrap();
        let o = encode_automaton(&m).unwrap();
        let pop = o.flows().iter().find(|f| f.body.stack.len() == 1 && f.head.stack.is_empty()).unwrap();
        assert_eq!(&*pop.body.stack[0].name(), "b_b");
        let push = o.flows().iter().find(|f| f.head.stack.len() == 2).unwrap();
        let names: Vec<_> = push.head.stack.iter().map(|s| s.name().to_string()).collect();
        assert_eq!(names, ["b_c", "b_b"]);
        assert_eq!(push.body.stack.len(), 1);
        assert!(parse_flow(&push.to_flow().unwrap().to_string()).is_ok());
    }
}

#[cfg(test)]
mod loop_tests {
    use super::*;
    use crate::machines::automaton::parse_automaton;
    use crate::machines::reduce::accepts;
    use crate::machines::simulate::{simulate, SimVerdict};

    fn words(n: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..n {
            layer = layer.iter().flat_map(|w| ["a", "b"].map(|c| format!("{w}{c}"))).collect();
            out.extend(layer.clone());
        }
        out
    }

    #[test]
    fn parens_small() {
        let m = parse_automaton(include_str!("../../testdata/parens.aut")).unwrap();
        let o = encode_automaton(&m).unwrap();
        for w in words(3) {
            let sim = simulate(&m, &w).unwrap().verdict == SimVerdict::Accept;
            assert_eq!(accepts(&o, &w).unwrap(), sim, "{w:?}");
        }
    }

    #[test]
    fn anbn_small() {
        let m = parse_automaton(include_str!("../../testdata/anbn.aut")).unwrap();
        let o = encode_automaton(&m).unwrap();
        for w in words(3) {
            let sim = simulate(&m, &w).unwrap().verdict == SimVerdict::Accept;
            assert_eq!(accepts(&o, &w).unwrap(), sim, "{w:?}");
        }
    }
}
