//! Explicit-state CTL labeling algorithm.
//!
//! Formulas are first rewritten to existential normal form. `EX` is a
//! preimage, `E[_ U _]` a backward least fixpoint, and `EG` is decided by
//! reachability of a nontrivial strongly connected component inside the
//! subgraph of states satisfying the operand.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{Formula, Kind};
use crate::kripke::{KripkeStructure, PointedStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("atom `{0}` is not in the structure's alphabet")]
    UndeclaredAtom(String),
}

/// A set of states as a membership vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateSet(Vec<bool>);

impl StateSet {
    pub fn empty(n: usize) -> StateSet {
        StateSet(vec![false; n])
    }

    pub fn full(n: usize) -> StateSet {
        StateSet(vec![true; n])
    }

    pub fn contains(&self, s: usize) -> bool {
        self.0[s]
    }

    pub fn insert(&mut self, s: usize) {
        self.0[s] = true;
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn complement(&self) -> StateSet {
        StateSet(self.0.iter().map(|b| !b).collect())
    }

    fn union(&self, other: &StateSet) -> StateSet {
        StateSet(self.0.iter().zip(&other.0).map(|(a, b)| *a || *b).collect())
    }
}

/// Labels states of one structure, memoizing per ENF subformula.
pub struct ModelChecker<'a> {
    m: &'a KripkeStructure,
    memo: HashMap<Formula, StateSet>,
}

impl<'a> ModelChecker<'a> {
    pub fn new(m: &'a KripkeStructure) -> ModelChecker<'a> {
        ModelChecker {
            m,
            memo: HashMap::new(),
        }
    }

    /// `{ s | (M, s) ⊨ φ }`.
    pub fn sat_set(&mut self, phi: &Formula) -> Result<StateSet, CheckError> {
        if let Some(atom) = phi.vars().iter().find(|a| !self.m.alphabet().contains(a)) {
            return Err(CheckError::UndeclaredAtom(atom.to_string()));
        }
        Ok(self.label(&phi.to_enf()))
    }

    fn label(&mut self, phi: &Formula) -> StateSet {
        if let Some(done) = self.memo.get(phi) {
            return done.clone();
        }
        let n = self.m.num_states();
        let out = match phi.kind() {
            Kind::Bottom => StateSet::empty(n),
            Kind::Top => StateSet::full(n),
            Kind::Atom(a) => StateSet(self.m.states().map(|s| self.m.label(s).contains(a)).collect()),
            Kind::Not(a) => self.label(a).complement(),
            Kind::Or(a, b) => {
                let a = self.label(a);
                a.union(&self.label(b))
            }
            Kind::EX(a) => {
                let inner = self.label(a);
                self.pre_exists(&inner)
            }
            Kind::EU(a, b) => {
                let hold = self.label(a);
                let goal = self.label(b);
                self.until(&hold, &goal)
            }
            Kind::EG(a) => {
                let inner = self.label(a);
                eg_by_cycles(self.m, &inner)
            }
            _ => unreachable!("labeling runs on ENF formulas only"),
        };
        self.memo.insert(phi.clone(), out.clone());
        out
    }

    fn pre_exists(&self, target: &StateSet) -> StateSet {
        StateSet(
            self.m
                .states()
                .map(|s| self.m.successors(s).iter().any(|&t| target.contains(t)))
                .collect(),
        )
    }

    /// Least set containing `goal` and closed under "in `hold` with a
    /// successor inside".
    fn until(&self, hold: &StateSet, goal: &StateSet) -> StateSet {
        let mut result = goal.clone();
        loop {
            let mut changed = false;
            for s in self.m.states() {
                if !result.contains(s)
                    && hold.contains(s)
                    && self.m.successors(s).iter().any(|&t| result.contains(t))
                {
                    result.insert(s);
                    changed = true;
                }
            }
            if !changed {
                return result;
            }
        }
    }
}

/// States of the `inner`-subgraph that can reach, inside it, a cycle that
/// stays inside it.
pub fn eg_by_cycles(m: &KripkeStructure, inner: &StateSet) -> StateSet {
    let n = m.num_states();
    // Reachability within the restricted subgraph.
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            if !inner.contains(start) {
                return seen;
            }
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(s) = stack.pop() {
                for &t in m.successors(s) {
                    if inner.contains(t) && !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
            seen
        })
        .collect();
    // A state lies on a cycle of the subgraph iff one of its in-subgraph
    // successors reaches it back.
    let on_cycle: Vec<bool> = (0..n)
        .map(|s| {
            inner.contains(s)
                && m
                    .successors(s)
                    .iter()
                    .any(|&t| inner.contains(t) && reach[t][s])
        })
        .collect();
    StateSet(
        (0..n)
            .map(|s| inner.contains(s) && (0..n).any(|c| on_cycle[c] && reach[s][c]))
            .collect(),
    )
}

/// Greatest fixpoint `Z = inner ∩ pre∃(Z)`; agrees with [`eg_by_cycles`].
pub fn eg_by_fixpoint(m: &KripkeStructure, inner: &StateSet) -> StateSet {
    let mut z = inner.clone();
    loop {
        let next = StateSet(
            m.states()
                .map(|s| z.contains(s) && m.successors(s).iter().any(|&t| z.contains(t)))
                .collect(),
        );
        if next == z {
            return z;
        }
        z = next;
    }
}

pub fn sat_set(m: &KripkeStructure, phi: &Formula) -> Result<StateSet, CheckError> {
    ModelChecker::new(m).sat_set(phi)
}

/// `K ⊨ φ`.
pub fn check(k: &PointedStructure, phi: &Formula) -> Result<bool, CheckError> {
    Ok(sat_set(&k.structure, phi)?.contains(k.focus))
}
