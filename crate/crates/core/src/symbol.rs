//! Interned function symbols.
//!
//! Every symbol is identified by its `(name, arity)` pair and interned in a
//! process-wide table, so a [`Sym`] is a plain `u32` that is cheap to copy,
//! hash and compare. The rule "one name, one arity" is enforced per engine
//! instance by a [`Signature`], which is what the parsers consult.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::Error;

/// Name of the distinguished binary symbol, printed infix as `.`.
pub const BULLET_NAME: &str = ".";
/// Name of the distinguished constant.
pub const STAR_NAME: &str = "star";

#[derive(Default)]
struct Interner {
    by_key: HashMap<(Arc<str>, usize), u32>,
    entries: Vec<(Arc<str>, usize)>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(|| {
    let mut interner = Interner::default();
    interner.get_or_insert(BULLET_NAME, 2);
    interner.get_or_insert(STAR_NAME, 0);
    RwLock::new(interner)
});

impl Interner {
    fn get_or_insert(&mut self, name: &str, arity: usize) -> u32 {
        if let Some(&id) = self.by_key.get(&(Arc::from(name), arity)) {
            return id;
        }
        let id = self.entries.len() as u32;
        let name: Arc<str> = Arc::from(name);
        self.entries.push((name.clone(), arity));
        self.by_key.insert((name, arity), id);
        id
    }
}

/// An interned function symbol.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(u32);

impl Sym {
    pub fn intern(name: &str, arity: usize) -> Sym {
        {
            let guard = INTERNER.read().expect("symbol table poisoned");
            if let Some(&id) = guard.by_key.get(&(Arc::from(name), arity)) {
                return Sym(id);
            }
        }
        let mut guard = INTERNER.write().expect("symbol table poisoned");
        Sym(guard.get_or_insert(name, arity))
    }

    /// Shorthand for a unary symbol.
    pub fn unary(name: &str) -> Sym {
        Sym::intern(name, 1)
    }

    /// Shorthand for a constant.
    pub fn constant(name: &str) -> Sym {
        Sym::intern(name, 0)
    }

    /// The binary symbol `•`.
    pub fn bullet() -> Sym {
        LazyLock::force(&INTERNER);
        Sym(0)
    }

    /// The constant `⋆`.
    pub fn star() -> Sym {
        LazyLock::force(&INTERNER);
        Sym(1)
    }

    pub fn name(self) -> Arc<str> {
        let guard = INTERNER.read().expect("symbol table poisoned");
        guard.entries[self.0 as usize].0.clone()
    }

    pub fn arity(self) -> usize {
        let guard = INTERNER.read().expect("symbol table poisoned");
        guard.entries[self.0 as usize].1
    }

    pub fn is_bullet(self) -> bool {
        self == Sym::bullet()
    }

    pub fn is_star(self) -> bool {
        self == Sym::star()
    }

    /// Symbols in the `_` namespace are reserved for engine-generated names
    /// (position constants, flattening markers, reduction symbols).
    pub fn is_reserved(self) -> bool {
        self.name().starts_with('_')
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name(), self.arity())
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Arity table of one engine instance: each name is bound to the arity of
/// its first use.
#[derive(Debug, Clone)]
pub struct Signature {
    arities: HashMap<Arc<str>, usize>,
}

impl Default for Signature {
    fn default() -> Self {
        let mut arities = HashMap::new();
        arities.insert(Arc::from(BULLET_NAME), 2);
        arities.insert(Arc::from(STAR_NAME), 0);
        Signature { arities }
    }
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares (or re-uses) `name` at `arity`.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<Sym, Error> {
        match self.arities.get(name) {
            Some(&known) if known != arity => Err(Error::ArityMismatch {
                name: name.to_string(),
                expected: known,
                found: arity,
            }),
            Some(_) => Ok(Sym::intern(name, arity)),
            None => {
                self.arities.insert(Arc::from(name), arity);
                Ok(Sym::intern(name, arity))
            }
        }
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinguished_symbols() {
        assert_eq!(Sym::bullet().arity(), 2);
        assert_eq!(&*Sym::star().name(), "star");
        assert_eq!(Sym::intern("star", 0), Sym::star());
    }

    #[test]
    fn signature_enforces_arity() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        assert_eq!(sig.declare("f", 1).unwrap(), f);
        assert!(matches!(
            sig.declare("f", 2),
            Err(Error::ArityMismatch { expected: 1, found: 2, .. })
        ));
        assert!(sig.declare("star", 1).is_err());
    }

    #[test]
    fn concurrent_interning_is_consistent() {
        let handles: Vec<_> = (0..8)
            .map(|_| std::thread::spawn(|| (0..200).map(|i| Sym::unary(&format!("conc{i}"))).collect::<Vec<_>>()))
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for r in &results[1..] {
            assert_eq!(r, &results[0]);
        }
    }
}
