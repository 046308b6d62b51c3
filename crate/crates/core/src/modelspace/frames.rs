//! Transition frames (state count plus successor masks) and the raw
//! candidate structures built on them.

use std::sync::Arc;

use crate::formula::{Atom, AtomSet};
use crate::kripke::{KripkeStructure, PointedStructure};

/// A total transition relation on states `b1..bn`, state `b1` initial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub succ: Vec<u32>,
}

impl Frame {
    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    /// The `rank`-th total relation on `n` states. State `b1`'s successor
    /// mask is the most significant digit.
    pub fn from_rank(n: usize, rank: u64) -> Frame {
        let base = (1u64 << n) - 1;
        let mut succ = vec![0u32; n];
        let mut r = rank;
        for i in (0..n).rev() {
            succ[i] = (r % base + 1) as u32;
            r /= base;
        }
        Frame { succ }
    }

    /// Initial-state condition from state 0: everything reachable from it,
    /// and any two states ordered by reachability.
    pub fn satisfies_initial_condition(&self) -> bool {
        let n = self.num_states();
        let reach: Vec<u32> = (0..n)
            .map(|s| {
                let mut seen = 1u32 << s;
                loop {
                    let mut next = seen;
                    for t in 0..n {
                        if seen >> t & 1 == 1 {
                            next |= self.succ[t];
                        }
                    }
                    if next == seen {
                        return seen;
                    }
                    seen = next;
                }
            })
            .collect();
        let all = (1u32 << n) - 1;
        reach[0] == all
            && (0..n).all(|u| (u + 1..n).all(|v| reach[u] >> v & 1 == 1 || reach[v] >> u & 1 == 1))
    }

    pub fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.succ[s];
        (0..self.num_states()).filter(move |t| mask >> t & 1 == 1)
    }
}

/// All frames with at most `max_states` states satisfying the initial-state
/// condition, ordered by state count and then rank.
pub fn initial_frames(max_states: usize) -> Vec<Frame> {
    let mut out = Vec::new();
    for n in 1..=max_states {
        let count = ((1u64 << n) - 1).pow(n as u32);
        out.extend(
            (0..count)
                .map(|r| Frame::from_rank(n, r))
                .filter(Frame::satisfies_initial_condition),
        );
    }
    out
}

/// Number of candidate structures before the initial-state filter.
pub fn raw_candidate_count(max_states: usize, atoms: usize) -> u128 {
    (1..=max_states)
        .map(|n| {
            let relations = ((1u128 << n) - 1).pow(n as u32);
            relations << (atoms * n).min(100)
        })
        .sum()
}

/// Labeling bit of atom `j` at state `s`.
pub fn label_bit(atoms: usize, s: usize, j: usize) -> usize {
    s * atoms + j
}

pub fn to_structure(frame: &Frame, labeling: u64, alphabet: &AtomSet) -> KripkeStructure {
    let atoms: Vec<&Atom> = alphabet.iter().collect();
    let n = frame.num_states();
    let names = (1..=n).map(|i| format!("b{i}")).collect();
    let succ = (0..n).map(|s| frame.successors(s).collect()).collect();
    let labels = (0..n)
        .map(|s| {
            atoms
                .iter()
                .enumerate()
                .filter(|(j, _)| labeling >> label_bit(atoms.len(), s, *j) & 1 == 1)
                .map(|(_, a)| (*a).clone())
                .collect()
        })
        .collect();
    KripkeStructure::from_parts(names, succ, labels, 0, alphabet.clone())
}

pub fn to_pointed(frame: &Frame, labeling: u64, alphabet: &AtomSet) -> PointedStructure {
    PointedStructure::new(Arc::new(to_structure(frame, labeling, alphabet)), 0)
}
