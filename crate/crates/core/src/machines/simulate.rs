//! Memoized simulation over surface configurations.
//!
//! For every surface configuration `(q, heads, b)` that starts a stack level
//! we compute the pairs `(q', heads')` reachable without leaving the level,
//! and those reached right after popping `b`. A push followed by a matching
//! pop then becomes a single summary step, and the automaton loops from the
//! initial configuration iff the graph of push and summary steps has a
//! reachable cycle.

use std::collections::{HashMap, HashSet};

use crate::error::Result;

use super::automaton::{Automaton, Letter, StackAction, Top};

/// State and head positions.
type Surf = (usize, Vec<usize>);
/// A surface configuration: state, head positions, top of stack.
pub type SurfaceConfig = (usize, Vec<usize>, Top);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimVerdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub verdict: SimVerdict,
    /// Surface configurations reached from the initial one.
    pub explored: usize,
}

struct Sim<'a> {
    m: &'a Automaton,
    tape: Vec<Letter>,
    ids: HashMap<SurfaceConfig, usize>,
    configs: Vec<SurfaceConfig>,
    /// Level starts `(q, heads, b)` → reachable surfaces on that level.
    reach: Vec<HashSet<Surf>>,
    /// Level starts → surfaces right after popping the level.
    pops: Vec<HashSet<Surf>>,
    /// Level starts → level starts that pushed into them.
    callers: Vec<HashSet<usize>>,
    work: Vec<(usize, Surf)>,
}

/// One step from `(surf, top)`: the successor surface and the stack action.
fn steps(m: &Automaton, tape: &[Letter], surf: &Surf, top: Top) -> Vec<(Surf, StackAction)> {
    let (q, pos) = surf;
    let mut out = Vec::new();
    for t in &m.transitions {
        if t.from != *q || t.top != top || t.read.iter().zip(pos).any(|(l, &p)| tape[p] != *l) {
            continue;
        }
        let mut next = pos.clone();
        if let Some((j, d)) = t.mover() {
            let p = next[j] as isize + d as isize;
            if p < 0 || p as usize >= tape.len() {
                continue;
            }
            next[j] = p as usize;
        }
        out.push(((t.to, next), t.action));
    }
    out
}

impl Sim<'_> {
    fn level(&mut self, cfg: SurfaceConfig) -> usize {
        if let Some(&id) = self.ids.get(&cfg) {
            return id;
        }
        let id = self.configs.len();
        self.ids.insert(cfg.clone(), id);
        self.work.push((id, (cfg.0, cfg.1.clone())));
        self.configs.push(cfg);
        self.reach.push(HashSet::new());
        self.pops.push(HashSet::new());
        self.callers.push(HashSet::new());
        id
    }

    fn run(&mut self) {
        while let Some((lvl, surf)) = self.work.pop() {
            if !self.reach[lvl].insert(surf.clone()) {
                continue;
            }
            let top = self.configs[lvl].2;
            for (next, action) in steps(self.m, &self.tape, &surf, top) {
                match action {
                    StackAction::Pop => {
                        if self.pops[lvl].insert(next.clone()) {
                            for &caller in &self.callers[lvl] {
                                self.work.push((caller, next.clone()));
                            }
                        }
                    }
                    StackAction::Push(e) => {
                        let child = self.level((next.0, next.1, Top::Sym(e)));
                        self.callers[child].insert(lvl);
                        for p in &self.pops[child] {
                            self.work.push((lvl, p.clone()));
                        }
                    }
                }
            }
        }
    }
}

/// Decides acceptance: `M` rejects `W` iff some run from the initial
/// configuration loops, a run entering a reject state looping by definition.
pub fn simulate(m: &Automaton, word: &str) -> Result<Simulation> {
    let tape = m.tape(word)?;
    let mut sim = Sim {
        m,
        tape,
        ids: HashMap::new(),
        configs: Vec::new(),
        reach: Vec::new(),
        pops: Vec::new(),
        callers: Vec::new(),
        work: Vec::new(),
    };
    let start = sim.level((m.init, vec![0; m.heads], Top::Bottom));
    sim.run();

    // The derived step graph on surface configurations.
    let mut node_ids: HashMap<SurfaceConfig, usize> = HashMap::new();
    let mut nodes: Vec<SurfaceConfig> = Vec::new();
    let mut node = |c: SurfaceConfig, nodes: &mut Vec<SurfaceConfig>| -> usize {
        *node_ids.entry(c.clone()).or_insert_with(|| {
            nodes.push(c);
            nodes.len() - 1
        })
    };
    let root = node(sim.configs[start].clone(), &mut nodes);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (q, pos, top) = nodes[i].clone();
        let mut out = Vec::new();
        if m.is_reject(q) {
            out.push(i);
        }
        for (next, action) in steps(m, &sim.tape, &(q, pos), top) {
            if let StackAction::Push(e) = action {
                let child_cfg = (next.0, next.1, Top::Sym(e));
                out.push(node(child_cfg.clone(), &mut nodes));
                let child = sim.ids[&child_cfg];
                for (q3, p3) in &sim.pops[child] {
                    out.push(node((*q3, p3.clone(), top), &mut nodes));
                }
            }
        }
        edges.push(out);
        i += 1;
    }
    let cyclic = reachable_cycle(root, &edges);
    Ok(Simulation {
        verdict: if cyclic { SimVerdict::Reject } else { SimVerdict::Accept },
        explored: nodes.len(),
    })
}

fn reachable_cycle(root: usize, edges: &[Vec<usize>]) -> bool {
    let mut colour = vec![0u8; edges.len()];
    let mut stack = vec![(root, 0usize)];
    colour[root] = 1;
    while let Some((n, k)) = stack.last_mut() {
        if *k == edges[*n].len() {
            colour[*n] = 2;
            stack.pop();
            continue;
        }
        let m = edges[*n][*k];
        *k += 1;
        match colour[m] {
            1 => return true,
            0 => {
                colour[m] = 1;
                stack.push((m, 0));
            }
            _ => {}
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::automaton::parse_automaton;

    #[test]
    fn no_transitions_accepts() {
        let m = parse_automaton("states: q\ninit: q\ninput: a").unwrap();
        for w in ["", "a", "aaa"] {
            assert_eq!(simulate(&m, w).unwrap().verdict, SimVerdict::Accept);
        }
    }

    #[test]
    fn self_loop_rejects() {
        let m = parse_automaton(
            "states: i p\ninit: i\ninput: a\nstack: b\ntrans:\n(i; ^; _) -> (p; 0; push b)\n(p; ^; b) -> (i; 0; pop)",
        )
        .unwrap();
        for w in ["", "a", "aa"] {
            assert_eq!(simulate(&m, w).unwrap().verdict, SimVerdict::Reject);
        }
    }

    #[test]
    fn unbounded_pushing_loops() {
        let m = parse_automaton("states: i\ninit: i\ninput: a\nstack: b\ntrans:\n(i; ^; _) -> (i; 0; push b)\n(i; ^; b) -> (i; 0; push b)")
            .unwrap();
        assert_eq!(simulate(&m, "a").unwrap().verdict, SimVerdict::Reject);
    }
}
