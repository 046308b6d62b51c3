//! Stratified V-bisimulation between the states of two structures.
//!
//! `strata[0]` relates states whose labels agree outside the ignored atom
//! set; `strata[n + 1]` keeps the pairs of `strata[n]` whose successors can
//! be matched in both directions inside `strata[n]`. The sequence shrinks
//! until two consecutive strata coincide.
//!
//! The ignored set is always passed explicitly. Callers that want the
//! distinguishability notion "w.r.t. V" pass the complement of V.

use crate::formula::AtomSet;
use crate::kripke::{KripkeStructure, PointedStructure};

/// A relation between the states of two structures, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct PairRelation {
    cols: usize,
    bits: Vec<bool>,
}

impl PairRelation {
    fn new(rows: usize, cols: usize) -> PairRelation {
        PairRelation {
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn contains(&self, left: usize, right: usize) -> bool {
        self.bits[left * self.cols + right]
    }

    fn set(&mut self, left: usize, right: usize, value: bool) {
        self.bits[left * self.cols + right] = value;
    }

    pub fn is_subset(&self, other: &PairRelation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / cols, i % cols))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Debug for PairRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// The decreasing family `B_0 ⊇ B_1 ⊇ ... ⊇ B_k = B_{k+1}`.
#[derive(Clone, Debug)]
pub struct BisimFamily {
    pub atoms_ignored: AtomSet,
    strata: Vec<PairRelation>,
}

impl BisimFamily {
    /// Strata `0..=k`, where `k` is the fixpoint index.
    pub fn strata(&self) -> &[PairRelation] {
        &self.strata
    }

    /// Least `k` with `B_k = B_{k+1}`.
    pub fn fixpoint_index(&self) -> usize {
        self.strata.len() - 1
    }

    pub fn fixpoint(&self) -> &PairRelation {
        self.strata.last().expect("at least one stratum")
    }

    /// Stratum `n`; strata past the fixpoint equal the fixpoint.
    pub fn stratum(&self, n: usize) -> &PairRelation {
        &self.strata[n.min(self.fixpoint_index())]
    }

    pub fn related(&self, left: usize, right: usize) -> bool {
        self.fixpoint().contains(left, right)
    }

    /// Least index whose stratum drops the pair, if any does.
    pub fn separation_depth(&self, left: usize, right: usize) -> Option<usize> {
        self.strata.iter().position(|r| !r.contains(left, right))
    }
}

fn labels_agree(
    left: &KripkeStructure,
    s: usize,
    right: &KripkeStructure,
    t: usize,
    ignored: &AtomSet,
) -> bool {
    let a = left.label(s);
    let b = right.label(t);
    a.iter()
        .filter(|x| !ignored.contains(x))
        .eq(b.iter().filter(|x| !ignored.contains(x)))
}

/// Computes the strata for `left` × `right` ignoring `ignored`.
pub fn bisim_family(
    left: &KripkeStructure,
    right: &KripkeStructure,
    ignored: &AtomSet,
) -> BisimFamily {
    let (n, m) = (left.num_states(), right.num_states());
    let mut base = PairRelation::new(n, m);
    for s in 0..n {
        for t in 0..m {
            base.set(s, t, labels_agree(left, s, right, t, ignored));
        }
    }
    let mut strata = vec![base];
    loop {
        let prev = strata.last().expect("nonempty");
        let mut next = PairRelation::new(n, m);
        for (s, t) in prev.pairs() {
            let forth = left
                .successors(s)
                .iter()
                .all(|&s2| right.successors(t).iter().any(|&t2| prev.contains(s2, t2)));
            let back = right
                .successors(t)
                .iter()
                .all(|&t2| left.successors(s).iter().any(|&s2| prev.contains(s2, t2)));
            next.set(s, t, forth && back);
        }
        if next == *prev {
            break;
        }
        strata.push(next);
    }
    BisimFamily {
        atoms_ignored: ignored.clone(),
        strata,
    }
}

/// `K1 ↔_V K2`: the focus states are related by the fixpoint.
pub fn v_bisimilar(k1: &PointedStructure, k2: &PointedStructure, ignored: &AtomSet) -> bool {
    bisim_family(&k1.structure, &k2.structure, ignored).related(k1.focus, k2.focus)
}

/// Least depth at which `s` and `t` of `m` stop being related when the atoms
/// in `ignored` are disregarded; `None` if they are bisimilar.
pub fn separation_depth(
    m: &KripkeStructure,
    s: usize,
    t: usize,
    ignored: &AtomSet,
) -> Option<usize> {
    bisim_family(m, m, ignored).separation_depth(s, t)
}

/// Characterization number of `m` with respect to the kept atoms `kept`.
///
/// If some pair of states is distinguishable on `kept` (not bisimilar when
/// the complement is ignored), this is the largest separation depth over
/// such pairs; otherwise it is the fixpoint index of the same family.
pub fn characterization_number(m: &KripkeStructure, kept: &AtomSet) -> usize {
    let ignored = m.alphabet().difference(kept);
    let family = bisim_family(m, m, &ignored);
    let n = m.num_states();
    let deepest = (0..n)
        .flat_map(|s| (0..n).map(move |t| (s, t)))
        .filter_map(|(s, t)| family.separation_depth(s, t))
        .max();
    deepest.unwrap_or_else(|| family.fixpoint_index())
}
