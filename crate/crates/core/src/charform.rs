//! Characterizing formulas of computation trees and initial K-structures.

use std::collections::HashMap;

use thiserror::Error;

use crate::bisim::characterization_number;
use crate::formula::{simplify, AtomSet, Formula};
use crate::kripke::{KripkeError, KripkeStructure, PointedStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharformError {
    #[error("unknown state #{0}")]
    UnknownState(usize),
    #[error(transparent)]
    Structure(#[from] KripkeError),
}

fn dedup_formulas(items: Vec<Formula>) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::with_capacity(items.len());
    for f in items {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// Builds tree formulas for one structure, sharing results per
/// `(state, depth)`.
struct TreeBuilder<'a> {
    m: &'a KripkeStructure,
    kept: &'a AtomSet,
    memo: HashMap<(usize, usize), Formula>,
}

impl TreeBuilder<'_> {
    fn literals(&self, s: usize) -> Formula {
        let label = self.m.label(s);
        Formula::conj(self.kept.iter().map(|a| {
            let lit = Formula::atom(a.clone());
            if label.contains(a) {
                lit
            } else {
                Formula::not(lit)
            }
        }))
    }

    fn tree(&mut self, s: usize, depth: usize) -> Formula {
        if let Some(f) = self.memo.get(&(s, depth)) {
            return f.clone();
        }
        let raw = if depth == 0 {
            self.literals(s)
        } else {
            let children = dedup_formulas(
                self.m
                    .successors(s)
                    .iter()
                    .map(|&t| self.tree(t, depth - 1))
                    .collect(),
            );
            let exists = children.iter().cloned().map(Formula::ex);
            let all = Formula::ax(Formula::disj(children.iter().cloned()));
            Formula::conj(exists.chain([all, self.literals(s)]))
        };
        let f = simplify(&raw);
        self.memo.insert((s, depth), f.clone());
        f
    }
}

/// Characterizing formula of the depth-`depth` computation tree at `state`
/// over the atoms in `kept`.
pub fn tree_formula(
    m: &KripkeStructure,
    state: usize,
    depth: usize,
    kept: &AtomSet,
) -> Result<Formula, CharformError> {
    if state >= m.num_states() {
        return Err(CharformError::UnknownState(state));
    }
    let mut builder = TreeBuilder {
        m,
        kept,
        memo: HashMap::new(),
    };
    Ok(builder.tree(state, depth))
}

/// Characterizing formula of an initial K-structure over the atoms in `kept`.
///
/// Its models are exactly the initial K-structures that are bisimilar to
/// `k` when the atoms outside `kept` are ignored.
pub fn structure_formula(k: &PointedStructure, kept: &AtomSet) -> Result<Formula, CharformError> {
    k.require_initial()?;
    let m = &*k.structure;
    let depth = characterization_number(m, kept);
    let mut builder = TreeBuilder {
        m,
        kept,
        memo: HashMap::new(),
    };
    let t: Vec<Formula> = m.states().map(|s| builder.tree(s, depth)).collect();
    let invariants = m.states().map(|s| {
        let succ = dedup_formulas(m.successors(s).iter().map(|&u| t[u].clone()).collect());
        let exists = succ.iter().cloned().map(Formula::ex);
        let step = Formula::conj(exists.chain([Formula::ax(Formula::disj(succ.iter().cloned()))]));
        Formula::ag(Formula::implies(t[s].clone(), step))
    });
    let raw = Formula::conj(std::iter::once(t[m.initial()].clone()).chain(invariants));
    Ok(simplify(&raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_any;
    use crate::kripke::{k2_fixture, parse_model};
    use crate::modelcheck::check;

    fn atoms(names: &[&str]) -> AtomSet {
        AtomSet::from_names(names).unwrap()
    }

    #[test]
    fn k2_tree_formulas() {
        let m = k2_fixture();
        let d = atoms(&["d"]);
        let show = |s, n| tree_formula(&m, s, n, &d).unwrap().to_string();
        assert_eq!(show(0, 0), "d");
        assert_eq!(show(1, 0), "!d");
        assert_eq!(show(0, 1), "AX !d & d");
        assert_eq!(show(1, 1), "AX !d & !d");
        assert_eq!(show(2, 1), "AX d & !d");
        assert_eq!(show(3, 1), "AX d & !d");
    }

    #[test]
    fn empty_vocabulary_gives_true() {
        let m = k2_fixture();
        for n in 0..4 {
            assert!(tree_formula(&m, 1, n, &AtomSet::new()).unwrap().is_top());
        }
        assert!(matches!(
            tree_formula(&m, 9, 0, &AtomSet::new()),
            Err(CharformError::UnknownState(9))
        ));
    }

    #[test]
    fn k2_structure_formula_text() {
        let k = PointedStructure::initial(k2_fixture());
        let f = structure_formula(&k, &atoms(&["d"])).unwrap();
        assert_eq!(
            f.to_string(),
            "AX !d & d & AG (AX !d & d -> AX (AX !d & !d)) & AG (AX !d & !d -> AX (AX d & !d)) \
             & AG (AX d & !d -> AX (AX !d & d))"
        );
        assert!(check(&k, &f).unwrap());
    }

    #[test]
    fn single_loop_structure_formula() {
        let m = parse_model("atoms: p\nstates: s0\ninit: s0\nlabel s0: p\ntrans: s0 -> s0\n").unwrap();
        let k = PointedStructure::initial(m);
        let f = structure_formula(&k, &atoms(&["p"])).unwrap();
        assert_eq!(f, parse_any("p & AG (p -> AX p)").unwrap());
    }

    #[test]
    fn non_initial_focus_is_rejected() {
        let m = std::sync::Arc::new(k2_fixture());
        let k = PointedStructure::new(m, 1);
        assert!(matches!(
            structure_formula(&k, &AtomSet::new()),
            Err(CharformError::Structure(KripkeError::NotInitial(_)))
        ));
    }
}
