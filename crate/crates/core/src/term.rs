//! First-order terms, substitutions and syntactic unification.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::symbol::Sym;

/// A variable. Printed as `X<n>`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(n: u32) -> Term {
        Term::Var(Var(n))
    }

    pub fn app(sym: Sym, args: Vec<Term>) -> Term {
        debug_assert_eq!(sym.arity(), args.len(), "arity of {sym:?}");
        Term::App(sym, args)
    }

    pub fn constant(sym: Sym) -> Term {
        Term::app(sym, Vec::new())
    }

    pub fn star() -> Term {
        Term::constant(Sym::star())
    }

    /// `left • right`.
    pub fn bullet(left: Term, right: Term) -> Term {
        Term::App(Sym::bullet(), vec![left, right])
    }

    /// Right-associated `t0 • t1 • … • tn`.
    pub fn bullets(parts: Vec<Term>) -> Term {
        let mut iter = parts.into_iter().rev();
        let last = iter.next().expect("at least one component");
        iter.fold(last, |acc, t| Term::bullet(t, acc))
    }

    /// `g1(g2(…gn(base)…))` for `seq = [g1, …, gn]`.
    pub fn unary_chain(seq: &[Sym], base: Term) -> Term {
        seq.iter()
            .rev()
            .fold(base, |acc, &s| Term::App(s, vec![acc]))
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App(..) => None,
        }
    }

    /// Maximal root-to-leaf distance.
    pub fn height(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.height() + 1).max().unwrap_or(0),
        }
    }

    /// Number of function symbol occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    pub fn occurs(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(v.0),
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    /// Adds `offset` to every variable index.
    pub fn shift_vars(&self, offset: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var(v.0 + offset)),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| a.shift_vars(offset)).collect()),
        }
    }

    /// Calls `visit(var, depth)` for every variable occurrence.
    pub fn visit_var_depths(&self, depth: usize, visit: &mut impl FnMut(Var, usize)) {
        match self {
            Term::Var(v) => visit(*v, depth),
            Term::App(_, args) => args.iter().for_each(|a| a.visit_var_depths(depth + 1, visit)),
        }
    }

    /// Calls `visit` on every symbol occurrence.
    pub fn visit_syms(&self, visit: &mut impl FnMut(Sym)) {
        if let Term::App(s, args) = self {
            visit(*s);
            args.iter().for_each(|a| a.visit_syms(visit));
        }
    }

    pub(crate) fn rename_with(&self, map: &mut HashMap<Var, Var>) -> Term {
        match self {
            Term::Var(v) => {
                let next = Var(map.len() as u32);
                Term::Var(*map.entry(*v).or_insert(next))
            }
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| a.rename_with(map)).collect()),
        }
    }

    /// Renames variables to `X0, X1, …` in left-to-right first-occurrence order.
    pub fn canonical(&self) -> Term {
        self.rename_with(&mut HashMap::new())
    }

    /// Reads a term of shape `g1(g2(…gn(X)…))` as `([g1, …, gn], X)`.
    pub fn as_unary_chain(&self) -> Option<(Vec<Sym>, Var)> {
        let mut seq = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Var(v) => return Some((seq, *v)),
                Term::App(s, args) if args.len() == 1 => {
                    seq.push(*s);
                    cur = &args[0];
                }
                Term::App(..) => return None,
            }
        }
    }

    /// Strips the outermost unary symbols: `g1(…gn(t)…)` gives
    /// `([g1, …, gn], t)` with `t` not a unary application.
    pub fn unary_prefix(&self) -> (Vec<Sym>, &Term) {
        let mut seq = Vec::new();
        let mut cur = self;
        while let Term::App(s, args) = cur {
            if args.len() != 1 {
                break;
            }
            seq.push(*s);
            cur = &args[0];
        }
        (seq, cur)
    }

    /// Splits a right-associated bullet spine into exactly `n` components.
    pub fn bullet_components(&self, n: usize) -> Option<Vec<&Term>> {
        let mut out = Vec::with_capacity(n);
        let mut cur = self;
        while out.len() + 1 < n {
            match cur {
                Term::App(s, args) if s.is_bullet() => {
                    out.push(&args[0]);
                    cur = &args[1];
                }
                _ => return None,
            }
        }
        out.push(cur);
        Some(out)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Named { term: self, names }
    }

    fn fmt_named(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        match self {
            Term::Var(v) => match names.get(v.0 as usize) {
                Some(n) => f.write_str(n),
                None => write!(f, "{v}"),
            },
            Term::App(s, args) if s.is_bullet() => {
                let left_is_bullet = matches!(&args[0], Term::App(l, _) if l.is_bullet());
                if left_is_bullet {
                    f.write_str("(")?;
                    args[0].fmt_named(f, names)?;
                    f.write_str(")")?;
                } else {
                    args[0].fmt_named(f, names)?;
                }
                f.write_str(" . ")?;
                args[1].fmt_named(f, names)
            }
            Term::App(s, args) => {
                f.write_str(&s.name())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        a.fmt_named(f, names)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

struct Named<'a> {
    term: &'a Term,
    names: &'a [String],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.term.fmt_named(f, self.names)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_named(f, &[])
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite map from variables to terms, kept in solved (idempotent) form by
/// the unifier.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a substitution from raw bindings; identity bindings are dropped.
    pub fn from_bindings(bindings: impl IntoIterator<Item = (Var, Term)>) -> Self {
        Substitution {
            bindings: bindings
                .into_iter()
                .filter(|(v, t)| t.as_var() != Some(*v))
                .collect(),
        }
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.bindings.get(&v)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    /// Simultaneous replacement of every bound variable.
    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.bindings.values().all(|t| self.apply(t) == *t)
    }

    /// Variable elimination step: `x ↦ t` where `t` contains no bound variable.
    fn eliminate(&mut self, x: Var, t: Term) {
        let single = Substitution {
            bindings: BTreeMap::from([(x, t.clone())]),
        };
        for value in self.bindings.values_mut() {
            if value.occurs(x) {
                *value = single.apply(value);
            }
        }
        self.bindings.insert(x, t);
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        NamedSubst { subst: self, names }
    }
}

struct NamedSubst<'a> {
    subst: &'a Substitution,
    names: &'a [String],
}

impl fmt::Display for NamedSubst<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.subst.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(
                f,
                "{} ↦ {}",
                Term::Var(*v).display_with(self.names),
                t.display_with(self.names)
            )?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&[]).fmt(f)
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Most general unifier by Martelli–Montanari solved-form transformation,
/// with occurs check. Variables shared between `t` and `u` are the same
/// variable.
pub fn unify(t: &Term, u: &Term) -> Option<Substitution> {
    let mut equations = vec![(t.clone(), u.clone())];
    let mut solved = Substitution::new();
    while let Some((a, b)) = equations.pop() {
        let a = solved.apply(&a);
        let b = solved.apply(&b);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.occurs(x) {
                    return None;
                }
                solved.eliminate(x, other);
            }
            (Term::App(f, fargs), Term::App(g, gargs)) => {
                if f != g || fargs.len() != gargs.len() {
                    return None;
                }
                // reversed so that arguments are solved left to right
                equations.extend(fargs.into_iter().zip(gargs).rev());
            }
        }
    }
    Some(solved)
}

/// True iff renamed-apart copies of `t` and `u` unify.
pub fn matchable(t: &Term, u: &Term) -> bool {
    let offset = t.max_var().map_or(0, |m| m + 1);
    unify(t, &u.shift_vars(offset)).is_some()
}
