//! One bottom-up pass of local, equivalence-preserving rewrites.
//!
//! All rewrites are sound on total transition relations, which is what makes
//! `EX a & AX a -> AX a` and `EX true -> true` valid here. The pass never
//! increases the tree size.

use std::collections::HashSet;

use super::{Formula, Kind};

fn flatten(f: &Formula, conj: bool, out: &mut Vec<Formula>) {
    match f.kind() {
        Kind::And(a, b) if conj => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        Kind::Or(a, b) if !conj => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        _ => out.push(f.clone()),
    }
}

fn dedup(items: Vec<Formula>) -> Vec<Formula> {
    let mut seen = HashSet::with_capacity(items.len());
    items.into_iter().filter(|f| seen.insert(f.clone())).collect()
}

fn simplify_junction(node: &Formula, conj: bool) -> Formula {
    let (unit, zero) = if conj {
        (Kind::Top, Kind::Bottom)
    } else {
        (Kind::Bottom, Kind::Top)
    };
    let mut operands = Vec::new();
    flatten(node, conj, &mut operands);
    if operands.iter().any(|f| *f.kind() == zero) {
        return Formula::new(zero);
    }
    operands.retain(|f| *f.kind() != unit);
    let operands = dedup(operands);
    let present: HashSet<&Formula> = operands.iter().collect();
    if operands
        .iter()
        .any(|f| matches!(f.kind(), Kind::Not(a) if present.contains(a)))
    {
        return Formula::new(zero);
    }

    // Under totality AX a entails EX a: in a conjunction the EX copy is
    // redundant, in a disjunction the AX copy is.
    let (keep, drop): (fn(&Kind) -> Option<&Formula>, fn(&Kind) -> Option<&Formula>) = if conj {
        (
            |k| match k {
                Kind::AX(a) => Some(a),
                _ => None,
            },
            |k| match k {
                Kind::EX(a) => Some(a),
                _ => None,
            },
        )
    } else {
        (
            |k| match k {
                Kind::EX(a) => Some(a),
                _ => None,
            },
            |k| match k {
                Kind::AX(a) => Some(a),
                _ => None,
            },
        )
    };
    let dominant: HashSet<Formula> = operands
        .iter()
        .filter_map(|f| keep(f.kind()).cloned())
        .collect();
    let operands: Vec<Formula> = if dominant.is_empty() {
        operands
    } else {
        operands
            .into_iter()
            .filter(|f| drop(f.kind()).map_or(true, |a| !dominant.contains(a)))
            .collect()
    };

    if conj {
        Formula::conj(operands)
    } else {
        Formula::disj(operands)
    }
}

fn rewrite(node: Formula) -> Formula {
    use Kind::*;
    match node.kind() {
        Not(a) => match a.kind() {
            Top => Formula::bottom(),
            Bottom => Formula::top(),
            Not(inner) => inner.clone(),
            _ => node,
        },
        And(..) => simplify_junction(&node, true),
        Or(..) => simplify_junction(&node, false),
        Implies(a, b) => match (a.kind(), b.kind()) {
            (Top, _) => b.clone(),
            (Bottom, _) | (_, Top) => Formula::top(),
            (_, Bottom) => rewrite(Formula::not(a.clone())),
            _ if a == b => Formula::top(),
            _ => node,
        },
        Iff(a, b) => match (a.kind(), b.kind()) {
            (Top, _) => b.clone(),
            (_, Top) => a.clone(),
            (Bottom, _) => rewrite(Formula::not(b.clone())),
            (_, Bottom) => rewrite(Formula::not(a.clone())),
            _ if a == b => Formula::top(),
            _ => node,
        },
        EX(a) | AX(a) | EF(a) | AF(a) | EG(a) | AG(a) if a.is_top() || a.is_bottom() => a.clone(),
        EU(a, b) | AU(a, b) => match (a.kind(), b.kind()) {
            (_, Top) | (_, Bottom) => b.clone(),
            (Bottom, _) => b.clone(),
            _ if a == b => b.clone(),
            _ => node,
        },
        _ => node,
    }
}

/// Applies the local rewrite rules once, bottom-up.
pub fn simplify(f: &Formula) -> Formula {
    f.map_bottom_up(&mut rewrite)
}
