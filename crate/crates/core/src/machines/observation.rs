use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::semiring::{Flow, Wiring};
use crate::symbol::Sym;
use crate::term::{Term, Var};

use super::word::{LEFT, RIGHT};

/// One side of an observation flow:
/// `c • d • σ(x) • q • aux(y₁,…,yₖ) • head(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObsSide {
    pub cell: Sym,
    pub dir: Sym,
    pub stack: Vec<Sym>,
    pub control: Sym,
    pub aux: Sym,
    pub aux_args: Vec<Var>,
    pub head: Sym,
    pub head_arg: Var,
}

impl ObsSide {
    pub fn to_term(&self, stack_var: Var) -> Term {
        let k = Term::constant;
        Term::bullets(vec![
            k(self.cell),
            k(self.dir),
            Term::unary_chain(&self.stack, Term::Var(stack_var)),
            k(self.control),
            Term::app(self.aux, self.aux_args.iter().map(|&v| Term::Var(v)).collect()),
            Term::app(self.head, vec![Term::Var(self.head_arg)]),
        ])
    }

    fn pointer_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.aux_args.iter().copied().chain(std::iter::once(self.head_arg))
    }
}

/// A flow of a balanced observation with stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObsFlow {
    pub head: ObsSide,
    pub body: ObsSide,
    pub stack_var: Var,
}

impl ObsFlow {
    pub fn to_flow(&self) -> Result<Flow> {
        Flow::new(self.head.to_term(self.stack_var), self.body.to_term(self.stack_var))
    }
}

/// A wiring checked to be a balanced observation with stack.
#[derive(Debug, Clone)]
pub struct Observation {
    wiring: Wiring,
    flows: Vec<ObsFlow>,
}

impl Observation {
    pub fn wiring(&self) -> &Wiring {
        &self.wiring
    }

    pub fn flows(&self) -> &[ObsFlow] {
        &self.flows
    }

    /// Symbols used in the main-pointer slot.
    pub fn head_symbols(&self) -> BTreeSet<Sym> {
        self.flows.iter().flat_map(|f| [f.head.head, f.body.head]).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn from_flows(flows: Vec<ObsFlow>) -> Result<Observation> {
        let wiring = flows.iter().map(ObsFlow::to_flow).collect::<Result<Wiring>>()?;
        validate_observation(&wiring)
    }
}

fn constant(t: &Term, what: &str) -> std::result::Result<Sym, String> {
    match t {
        Term::App(s, args) if args.is_empty() => Ok(*s),
        _ => Err(format!("{what} `{t}` is not a constant")),
    }
}

fn side(t: &Term) -> std::result::Result<(ObsSide, Var), String> {
    let parts = t
        .bullet_components(6)
        .ok_or_else(|| format!("`{t}` does not have six •-components"))?;
    let cell = constant(parts[0], "symbol")?;
    let dir = constant(parts[1], "direction")?;
    if &*dir.name() != LEFT && &*dir.name() != RIGHT {
        return Err(format!("direction `{dir}` is neither `{LEFT}` nor `{RIGHT}`"));
    }
    let (stack, x) = parts[2]
        .as_unary_chain()
        .ok_or_else(|| format!("stack component `{}` is not a unary chain over a variable", parts[2]))?;
    let control = constant(parts[3], "state")?;
    let (aux, aux_args) = match parts[4] {
        Term::App(s, args) => {
            let vars = args
                .iter()
                .map(|a| a.as_var().ok_or_else(|| format!("pointer argument `{a}` is not a variable")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            (*s, vars)
        }
        other => return Err(format!("auxiliary pointers `{other}` must be an application")),
    };
    let (head, head_arg) = match parts[5] {
        Term::App(s, args) if args.len() == 1 => (
            *s,
            args[0]
                .as_var()
                .ok_or_else(|| format!("main pointer `{}` is not a variable", args[0]))?,
        ),
        other => return Err(format!("main pointer `{other}` must be a unary application")),
    };
    Ok((
        ObsSide {
            cell,
            dir,
            stack,
            control,
            aux,
            aux_args,
            head,
            head_arg,
        },
        x,
    ))
}

fn check_flow(f: &Flow) -> std::result::Result<ObsFlow, String> {
    if let Some(s) = f.symbols().into_iter().find(|s| s.is_reserved()) {
        return Err(format!("uses reserved symbol `{s}`"));
    }
    let (head, x) = side(f.head())?;
    let (body, y) = side(f.body())?;
    if x != y {
        return Err("stack variables differ between head and body".into());
    }
    if head.pointer_vars().chain(body.pointer_vars()).any(|v| v == x) {
        return Err(format!("stack variable {x} also used as a pointer"));
    }
    Ok(ObsFlow {
        head,
        body,
        stack_var: x,
    })
}

/// Checks that every flow has the `Σ_lr • Stack • Balanced` shape and uses
/// no reserved symbol (position constants live in the reserved namespace).
pub fn validate_observation(w: &Wiring) -> Result<Observation> {
    let mut flows = Vec::with_capacity(w.len());
    for (index, f) in w.iter().enumerate() {
        match check_flow(f) {
            Ok(of) => flows.push(of),
            Err(reason) => return Err(Error::Observation { index, reason: format!("{f}: {reason}") }),
        }
    }
    Ok(Observation {
        wiring: w.clone(),
        flows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_wiring;

    #[test]
    fn accepts_shape() {
        let w = parse_wiring("a . r . X . q1 . aux(Y) . head(Z) <- star . l . s(X) . q0 . aux(Z) . head(Y)").unwrap();
        let o = validate_observation(&w).unwrap();
        assert_eq!(o.flows().len(), 1);
        assert_eq!(o.flows()[0].body.stack.len(), 1);
        assert!(validate_observation(&Wiring::zero()).unwrap().is_empty());
    }

    #[test]
    fn rejects_positions_and_binary_stacks() {
        let pos = parse_wiring("a . r . X . q . aux . head(Z) <- a . l . X . q . aux . head(Z)\nstar . r . _pos0 <- a . l . _pos1").unwrap();
        assert!(matches!(validate_observation(&pos), Err(Error::Observation { .. })));
        let bin = parse_wiring("a . r . g(X, X) . q . aux . head(Z) <- a . l . X . q . aux . head(Z)").unwrap();
        let err = validate_observation(&bin).unwrap_err().to_string();
        assert!(err.contains("unary chain"), "{err}");
        let dir = parse_wiring("a . up . X . q . aux . head(Z) <- a . l . X . q . aux . head(Z)").unwrap();
        assert!(validate_observation(&dir).is_err());
    }
}
