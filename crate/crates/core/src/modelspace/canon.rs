//! Canonical keys for bisimulation classes of candidate structures.
//!
//! Two initial structures get the same key iff they are bisimilar once the
//! atoms outside `kept` are ignored: the key is the quotient by the
//! coarsest bisimulation on projected labels, put in the least form over
//! all orderings of its classes that keep the initial class first.

use super::frames::Frame;

/// Projected label of every state as a bitmask over kept atoms.
fn projected_labels(frame: &Frame, labeling: u64, atoms: usize, kept: u64) -> Vec<u64> {
    (0..frame.num_states())
        .map(|s| {
            let row = (labeling >> (s * atoms)) & ((1u64 << atoms) - 1);
            row & kept
        })
        .collect()
}

/// Coarsest stable partition by signature refinement; returns class ids.
fn refine(frame: &Frame, labels: &[u64]) -> (Vec<usize>, usize) {
    let n = frame.num_states();
    let mut class = renumber(&(0..n).map(|s| (labels[s], 0u64)).collect::<Vec<_>>());
    let mut count = class.iter().max().map_or(0, |m| m + 1);
    loop {
        let sig: Vec<(u64, u64)> = (0..n)
            .map(|s| {
                let succ = frame.successors(s).fold(0u64, |acc, t| acc | 1 << class[t]);
                (class[s] as u64, succ)
            })
            .collect();
        let next = renumber(&sig);
        let next_count = next.iter().max().map_or(0, |m| m + 1);
        if next_count == count {
            return (class, count);
        }
        class = next;
        count = next_count;
    }
}

fn renumber<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    keys.iter()
        .map(|k| distinct.binary_search(k).expect("present"))
        .collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Canonical key of the class of `(frame, labeling)` under bisimulation
/// that ignores every atom whose bit is clear in `kept`.
pub fn class_key(frame: &Frame, labeling: u64, atoms: usize, kept: u64) -> Vec<u64> {
    let labels = projected_labels(frame, labeling, atoms, kept);
    let (class, k) = refine(frame, &labels);
    let mut label = vec![0u64; k];
    let mut succ = vec![0u64; k];
    for s in 0..frame.num_states() {
        label[class[s]] = labels[s];
        succ[class[s]] = frame.successors(s).fold(0, |acc, t| acc | 1 << class[t]);
    }
    let root = class[0];
    let mut rest: Vec<usize> = (0..k).filter(|&c| c != root).collect();
    let mut best: Option<Vec<u64>> = None;
    loop {
        // position[c] is the new index of class c.
        let order: Vec<usize> = std::iter::once(root).chain(rest.iter().copied()).collect();
        let mut position = vec![0usize; k];
        for (i, &c) in order.iter().enumerate() {
            position[c] = i;
        }
        let mut enc = Vec::with_capacity(2 * k + 1);
        enc.push(k as u64);
        for &c in &order {
            let mapped = (0..k)
                .filter(|&d| succ[c] >> d & 1 == 1)
                .fold(0u64, |acc, d| acc | 1 << position[d]);
            enc.push(label[c]);
            enc.push(mapped);
        }
        if best.as_ref().map_or(true, |b| enc < *b) {
            best = Some(enc);
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    best.expect("at least one ordering")
}
