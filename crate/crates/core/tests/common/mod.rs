//! Shared strategies and brute-force oracles for the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;

use ctl_forget::formula::{Atom, AtomSet, Formula};
use ctl_forget::kripke::KripkeStructure;

pub fn atoms(names: &[&str]) -> AtomSet {
    AtomSet::from_names(names).unwrap()
}

pub fn f(text: &str) -> Formula {
    ctl_forget::formula::parse_any(text).unwrap()
}

/// Random CTL formulas over `names`, nested at most `depth` deep.
pub fn formula(names: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let mut leaves = vec![Just(Formula::top()).boxed(), Just(Formula::bottom()).boxed()];
    for n in names {
        leaves.push(Just(Formula::var(n)).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves);
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            inner.clone().prop_map(Formula::ex),
            inner.clone().prop_map(Formula::ax),
            inner.clone().prop_map(Formula::ef),
            inner.clone().prop_map(Formula::af),
            inner.clone().prop_map(Formula::eg),
            inner.clone().prop_map(Formula::ag),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::eu(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::au(a, b)),
        ]
    })
    .boxed()
}

/// Propositional formulas over `names`.
pub fn prop_formula(names: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let mut leaves = vec![Just(Formula::top()).boxed(), Just(Formula::bottom()).boxed()];
    for n in names {
        leaves.push(Just(Formula::var(n)).boxed());
    }
    proptest::strategy::Union::new(leaves)
        .prop_recursive(depth, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
            ]
        })
        .boxed()
}

/// A subset of the atoms in `names`.
pub fn subset(names: &'static [&'static str]) -> BoxedStrategy<AtomSet> {
    proptest::collection::vec(any::<bool>(), names.len())
        .prop_map(move |bits| {
            names
                .iter()
                .zip(bits)
                .filter(|(_, b)| *b)
                .map(|(n, _)| Atom::new(n).unwrap())
                .collect()
        })
        .boxed()
}

/// Total structures with 1 to `max` states over `names`, initial state 0.
/// The initial-state condition is not required.
pub fn structure(names: &'static [&'static str], max: usize) -> BoxedStrategy<KripkeStructure> {
    (1..=max)
        .prop_flat_map(move |n| {
            let edges = proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n);
            let labels = proptest::collection::vec(proptest::collection::vec(any::<bool>(), names.len()), n);
            (edges, labels)
        })
        .prop_map(move |(edges, labels)| {
            let n = edges.len();
            let mut trans = Vec::new();
            for (s, row) in edges.iter().enumerate() {
                for (t, &e) in row.iter().enumerate() {
                    if e {
                        trans.push((s, t));
                    }
                }
                // keep the relation total
                if !row.iter().any(|&e| e) {
                    trans.push((s, (s + 1) % n));
                }
            }
            let labels = labels
                .iter()
                .map(|bits| {
                    names
                        .iter()
                        .zip(bits)
                        .filter(|(_, b)| **b)
                        .map(|(a, _)| Atom::new(a).unwrap())
                        .collect()
                })
                .collect();
            let state_names = (0..n).map(|i| format!("s{i}")).collect();
            KripkeStructure::new(state_names, &trans, labels, 0, atoms(names)).unwrap()
        })
        .boxed()
}

/// Copy of `m` with every state doubled. Both copies keep the original
/// transitions to both copies of each successor, and the second copy gets
/// its atoms in `relabel` replaced by `fresh`. Each state `s` of `m` is
/// bisimilar to `s` and `s + n` of the copy once `relabel` is ignored.
pub fn doubled(m: &KripkeStructure, relabel: &AtomSet, fresh: &AtomSet) -> KripkeStructure {
    let n = m.num_states();
    let names = (0..2 * n).map(|i| format!("c{i}")).collect();
    let mut trans = Vec::new();
    for (s, t) in m.transitions() {
        for a in [s, s + n] {
            trans.push((a, t));
            trans.push((a, t + n));
        }
    }
    let mut labels: Vec<AtomSet> = m.states().map(|s| m.label(s).clone()).collect();
    for s in m.states() {
        labels.push(m.label(s).difference(relabel).union(fresh));
    }
    KripkeStructure::new(names, &trans, labels, m.initial(), m.alphabet().clone()).unwrap()
}

/// Depth-`depth` unfolding of `m` at `s`, labels projected away from
/// `ignored`.
#[derive(Clone, Debug)]
pub struct Tree {
    pub label: AtomSet,
    pub children: Vec<Tree>,
}

pub fn unfold(m: &KripkeStructure, s: usize, depth: usize, ignored: &AtomSet) -> Tree {
    Tree {
        label: m.label(s).difference(ignored),
        children: if depth == 0 {
            Vec::new()
        } else {
            m.successors(s)
                .iter()
                .map(|&t| unfold(m, t, depth - 1, ignored))
                .collect()
        },
    }
}

/// Bisimilarity of two finite trees of equal height.
pub fn trees_bisimilar(a: &Tree, b: &Tree) -> bool {
    a.label == b.label
        && a.children
            .iter()
            .all(|x| b.children.iter().any(|y| trees_bisimilar(x, y)))
        && b.children
            .iter()
            .all(|y| a.children.iter().any(|x| trees_bisimilar(x, y)))
}

/// Tree-level bisimilarity for every depth up to `depth`.
pub fn tree_related(
    m1: &KripkeStructure,
    s1: usize,
    m2: &KripkeStructure,
    s2: usize,
    depth: usize,
    ignored: &AtomSet,
) -> bool {
    (0..=depth).all(|j| trees_bisimilar(&unfold(m1, s1, j, ignored), &unfold(m2, s2, j, ignored)))
}
