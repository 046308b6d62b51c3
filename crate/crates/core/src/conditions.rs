//! Strongest necessary and weakest sufficient conditions via forgetting.
//!
//! For an atom `q` and a target vocabulary `V` under a background formula
//! `φ`, the SNC is `F(φ ∧ q, A − V)` and the WSC is `¬F(φ ∧ ¬q, A − V)`,
//! where `A` is the declared alphabet. Forgetting everything outside `V`
//! keeps the result inside `V`. Conditions of a formula `α` go through a
//! fresh atom `q` constrained by `q ↔ α`.

use thiserror::Error;

use crate::charform::structure_formula;
use crate::forgetting::{forget, ForgetError};
use crate::formula::{simplify, Atom, AtomSet, Formula};
use crate::kripke::PointedStructure;
use crate::modelspace::UniverseConfig;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("target atom `{0}` must be in the alphabet and outside the vocabulary")]
    TargetAtom(String),
    #[error("vocabulary atom `{0}` is not in the alphabet")]
    Vocabulary(String),
    #[error("atom `{0}` of the background is not in the alphabet")]
    Background(String),
    #[error("structure alphabet {0} differs from the declared alphabet {1}")]
    StructureAlphabet(String, String),
    #[error(transparent)]
    Forget(#[from] ForgetError),
}

/// Which condition to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Snc,
    Wsc,
}

/// What the condition is about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Atom(Atom),
    Formula(Formula),
}

fn check_sides(q: &Atom, v: &AtomSet, phi: &Formula, config: &UniverseConfig) -> Result<(), ConditionError> {
    if let Some(a) = v.iter().find(|a| !config.alphabet.contains(a)) {
        return Err(ConditionError::Vocabulary(a.to_string()));
    }
    if !config.alphabet.contains(q) || v.contains(q) {
        return Err(ConditionError::TargetAtom(q.to_string()));
    }
    if let Some(a) = phi.vars().iter().find(|a| !config.alphabet.contains(a)) {
        return Err(ConditionError::Background(a.to_string()));
    }
    Ok(())
}

fn atom_condition(
    which: Condition,
    q: &Atom,
    v: &AtomSet,
    phi: &Formula,
    config: &UniverseConfig,
) -> Result<Formula, ConditionError> {
    check_sides(q, v, phi, config)?;
    let forget_set = config.alphabet.difference(v);
    let lit = Formula::atom(q.clone());
    Ok(match which {
        Condition::Snc => forget(&Formula::and(phi.clone(), lit), &forget_set, config)?.formula,
        Condition::Wsc => {
            let f = forget(&Formula::and(phi.clone(), Formula::not(lit)), &forget_set, config)?;
            simplify(&Formula::not(f.formula))
        }
    })
}

/// Strongest necessary condition of `q` on `v` under `phi`.
pub fn snc_atom(q: &Atom, v: &AtomSet, phi: &Formula, config: &UniverseConfig) -> Result<Formula, ConditionError> {
    atom_condition(Condition::Snc, q, v, phi, config)
}

/// Weakest sufficient condition of `q` on `v` under `phi`.
pub fn wsc_atom(q: &Atom, v: &AtomSet, phi: &Formula, config: &UniverseConfig) -> Result<Formula, ConditionError> {
    atom_condition(Condition::Wsc, q, v, phi, config)
}

fn formula_condition(
    which: Condition,
    alpha: &Formula,
    v: &AtomSet,
    gamma: &Formula,
    config: &UniverseConfig,
) -> Result<Formula, ConditionError> {
    if let Some(a) = alpha.vars().iter().find(|a| !config.alphabet.contains(a)) {
        return Err(ConditionError::Background(a.to_string()));
    }
    let q = config.alphabet.fresh_atom();
    let mut extended = config.alphabet.clone();
    extended.insert(q.clone());
    let config = config.with_alphabet(extended);
    let background = Formula::and(gamma.clone(), Formula::iff(Formula::atom(q.clone()), alpha.clone()));
    atom_condition(which, &q, v, &background, &config)
}

/// SNC of the formula `alpha` on `v` under `gamma`, through a fresh atom.
pub fn snc_formula(alpha: &Formula, v: &AtomSet, gamma: &Formula, config: &UniverseConfig) -> Result<Formula, ConditionError> {
    formula_condition(Condition::Snc, alpha, v, gamma, config)
}

/// WSC of the formula `alpha` on `v` under `gamma`, through a fresh atom.
pub fn wsc_formula(alpha: &Formula, v: &AtomSet, gamma: &Formula, config: &UniverseConfig) -> Result<Formula, ConditionError> {
    formula_condition(Condition::Wsc, alpha, v, gamma, config)
}

/// Condition of `target` on `v` under the initial structure `k`, taking
/// `k`'s characterizing formula over the whole alphabet as background.
pub fn condition_under_structure(
    which: Condition,
    k: &PointedStructure,
    target: &Target,
    v: &AtomSet,
    config: &UniverseConfig,
) -> Result<Formula, ConditionError> {
    let alphabet = k.structure.alphabet();
    if alphabet != &config.alphabet {
        return Err(ConditionError::StructureAlphabet(
            alphabet.to_string(),
            config.alphabet.to_string(),
        ));
    }
    let background = structure_formula(k, &config.alphabet).map_err(ForgetError::from)?;
    match target {
        Target::Atom(q) => atom_condition(which, q, v, &background, config),
        Target::Formula(alpha) => formula_condition(which, alpha, v, &background, config),
    }
}

pub fn snc_under_structure(
    k: &PointedStructure,
    target: &Target,
    v: &AtomSet,
    config: &UniverseConfig,
) -> Result<Formula, ConditionError> {
    condition_under_structure(Condition::Snc, k, target, v, config)
}

pub fn wsc_under_structure(
    k: &PointedStructure,
    target: &Target,
    v: &AtomSet,
    config: &UniverseConfig,
) -> Result<Formula, ConditionError> {
    condition_under_structure(Condition::Wsc, k, target, v, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_any;
    use crate::kripke::parse_model;
    use crate::modelspace::{entails, equivalent};

    fn atoms(names: &[&str]) -> AtomSet {
        AtomSet::from_names(names).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_any(text).unwrap()
    }

    fn a(name: &str) -> Atom {
        Atom::new(name).unwrap()
    }

    fn cfg(names: &[&str], m: usize) -> UniverseConfig {
        UniverseConfig::new(atoms(names), m)
    }

    #[test]
    fn propositional_examples() {
        let c = cfg(&["p", "q"], 2);
        let snc = snc_atom(&a("q"), &atoms(&["p"]), &f("q & p"), &c).unwrap();
        assert!(equivalent(&snc, &f("p"), &c).unwrap());
        let wsc = wsc_atom(&a("q"), &atoms(&["p"]), &f("q <-> p"), &c).unwrap();
        assert!(equivalent(&wsc, &f("p"), &c).unwrap());
        let snc = snc_atom(&a("q"), &atoms(&["p"]), &Formula::top(), &c).unwrap();
        assert!(equivalent(&snc, &Formula::top(), &c).unwrap());
        let wsc = wsc_atom(&a("q"), &atoms(&["p"]), &Formula::top(), &c).unwrap();
        assert!(equivalent(&wsc, &Formula::bottom(), &c).unwrap());
    }

    #[test]
    fn necessary_and_sufficient() {
        let c = cfg(&["p", "q"], 2);
        let q = a("q");
        let v = atoms(&["p"]);
        for text in ["AG (q -> EX p)", "q <-> AF p", "EF q & AG (p -> q)", "E[p U q]"] {
            let phi = f(text);
            let snc = snc_atom(&q, &v, &phi, &c).unwrap();
            let wsc = wsc_atom(&q, &v, &phi, &c).unwrap();
            let qf = Formula::atom(q.clone());
            assert!(entails(&phi, &Formula::implies(qf.clone(), snc.clone()), &c).unwrap());
            assert!(entails(&phi, &Formula::implies(wsc.clone(), qf.clone()), &c).unwrap());
            assert!(snc.vars().is_subset(&v) && wsc.vars().is_subset(&v), "{text}");
            // Duality: the negated SNC of q is the WSC of !q, computed as
            // the WSC of q under the background with q renamed.
            let flipped = phi.substitute(&q, &Formula::not(qf.clone()));
            let wsc_neg = wsc_atom(&q, &v, &flipped, &c).unwrap();
            assert!(equivalent(&Formula::not(snc), &wsc_neg, &c).unwrap(), "{text}");
        }
    }

    #[test]
    fn formula_targets_use_a_fresh_atom() {
        let c = cfg(&["d", "se"], 2);
        let gamma = f("EF se -> AG d");
        let snc = snc_formula(&f("se"), &atoms(&["d"]), &gamma, &c).unwrap();
        assert!(snc.vars().is_subset(&atoms(&["d"])));
        let trivial = snc_formula(&Formula::top(), &atoms(&["d"]), &gamma, &c).unwrap();
        assert!(equivalent(&trivial, &Formula::top(), &c).unwrap());
    }

    #[test]
    fn side_conditions() {
        let c = cfg(&["p", "q"], 1);
        assert!(matches!(
            snc_atom(&a("p"), &atoms(&["p"]), &Formula::top(), &c),
            Err(ConditionError::TargetAtom(_))
        ));
        assert!(matches!(
            snc_atom(&a("q"), &atoms(&["r"]), &Formula::top(), &c),
            Err(ConditionError::Vocabulary(_))
        ));
    }

    #[test]
    fn single_loop_structure() {
        let m = parse_model("atoms: p q\nstates: s\ninit: s\nlabel s: q\ntrans: s -> s\n").unwrap();
        let k = PointedStructure::initial(m);
        let c = cfg(&["p", "q"], 2);
        let v = atoms(&["p"]);
        let snc = snc_under_structure(&k, &Target::Atom(a("q")), &v, &c).unwrap();
        // p never holds on the loop.
        assert!(equivalent(&snc, &f("!p & AG (!p -> AX !p)"), &c).unwrap());
        let wsc = wsc_under_structure(&k, &Target::Atom(a("q")), &v, &c).unwrap();
        assert!(wsc.is_top());
    }
}
