//! Forgetting atoms from CTL formulas within a bounded model space.
//!
//! `forget(φ, V)` is the disjunction of the characterizing formulas, over
//! the atoms outside `V`, of one representative per class of `Mod(φ)`
//! under bisimulation that ignores `V`. The representative of a class is
//! its first member in enumeration order.

use std::collections::HashSet;

use thiserror::Error;

use crate::bisim::v_bisimilar;
use crate::charform::{structure_formula, CharformError};
use crate::formula::{simplify, AtomSet, Formula};
use crate::kripke::PointedStructure;
use crate::modelspace::{entails, equivalent, SpaceError, Universe, UniverseConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForgetError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Charform(#[from] CharformError),
    #[error("atom `{0}` is not in the alphabet")]
    NotInAlphabet(String),
    #[error("formula is not propositional: {0}")]
    NotPropositional(String),
}

#[derive(Clone, Debug)]
pub struct ForgetResult {
    pub formula: Formula,
    pub class_representatives: Vec<PointedStructure>,
    pub config: UniverseConfig,
}

fn require_in_alphabet(set: &AtomSet, config: &UniverseConfig) -> Result<(), ForgetError> {
    match set.iter().find(|a| !config.alphabet.contains(a)) {
        Some(a) => Err(ForgetError::NotInAlphabet(a.to_string())),
        None => Ok(()),
    }
}

/// Result of forgetting `v` from `phi`, relative to `config`.
pub fn forget(phi: &Formula, v: &AtomSet, config: &UniverseConfig) -> Result<ForgetResult, ForgetError> {
    require_in_alphabet(&phi.vars(), config)?;
    require_in_alphabet(v, config)?;
    let kept = config.alphabet.difference(v);
    let universe = Universe::new(config)?;
    let models = universe.models(std::slice::from_ref(phi))?;
    let mut seen = HashSet::new();
    let reps: Vec<PointedStructure> = models
        .into_iter()
        .filter(|&c| seen.insert(universe.class_key(c, &kept)))
        .map(|c| universe.pointed(c))
        .collect();
    let disjuncts = reps
        .iter()
        .map(|k| structure_formula(k, &kept))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ForgetResult {
        formula: simplify(&Formula::disj(disjuncts)),
        class_representatives: reps,
        config: config.clone(),
    })
}

/// Propositional forgetting by `φ[p/⊥] ∨ φ[p/⊤]`, one atom at a time in
/// alphabetical order.
pub fn forget_prop(phi: &Formula, v: &AtomSet) -> Result<Formula, ForgetError> {
    if !phi.is_propositional() {
        return Err(ForgetError::NotPropositional(phi.to_string()));
    }
    Ok(v.iter().fold(simplify(phi), |acc, p| {
        let low = acc.substitute(p, &Formula::bottom());
        let high = acc.substitute(p, &Formula::top());
        simplify(&Formula::or(low, high))
    }))
}

/// Whether some bounded model of `phi` is bisimilar to `k` ignoring `v`.
/// Decided on structures directly, without building the forgotten formula.
pub fn is_model_of_forget(
    k: &PointedStructure,
    phi: &Formula,
    v: &AtomSet,
    config: &UniverseConfig,
) -> Result<bool, ForgetError> {
    require_in_alphabet(&phi.vars(), config)?;
    require_in_alphabet(v, config)?;
    k.require_initial().map_err(CharformError::from)?;
    let universe = Universe::new(config)?;
    let models = universe.models(std::slice::from_ref(phi))?;
    Ok(models
        .into_iter()
        .any(|c| v_bisimilar(&universe.pointed(c), k, v)))
}

/// Outcome of one persistence check against a probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub probe: Formula,
    pub phi_entails: bool,
    pub forgotten_entails: bool,
}

impl ProbeOutcome {
    pub fn holds(&self) -> bool {
        self.phi_entails == self.forgotten_entails
    }
}

/// Postulate check for one `(φ, V)` within the bound.
#[derive(Clone, Debug)]
pub struct PostulateReport {
    pub forgotten: Formula,
    /// `φ ⊨ φ′`.
    pub weakening: bool,
    /// Probes sharing no atom with `V`; the others are skipped.
    pub probes: Vec<ProbeOutcome>,
    pub skipped_probes: usize,
    /// `φ′` is `V`-irrelevant.
    pub irrelevance: bool,
}

impl PostulateReport {
    /// `φ ⊨ η` implies `φ′ ⊨ η` for every considered probe.
    pub fn positive_persistence(&self) -> bool {
        self.probes
            .iter()
            .all(|o| !o.phi_entails || o.forgotten_entails)
    }

    /// `φ ⊭ η` implies `φ′ ⊭ η` for every considered probe.
    pub fn negative_persistence(&self) -> bool {
        self.probes
            .iter()
            .all(|o| o.phi_entails || !o.forgotten_entails)
    }

    pub fn all_hold(&self) -> bool {
        self.weakening && self.positive_persistence() && self.negative_persistence() && self.irrelevance
    }
}

pub fn verify_postulates(
    phi: &Formula,
    v: &AtomSet,
    config: &UniverseConfig,
    probes: &[Formula],
) -> Result<PostulateReport, ForgetError> {
    for p in probes {
        require_in_alphabet(&p.vars(), config)?;
    }
    let forgotten = forget(phi, v, config)?.formula;
    let weakening = entails(phi, &forgotten, config)?;
    let mut outcomes = Vec::new();
    let mut skipped = 0;
    for eta in probes {
        if !eta.vars().is_disjoint(v) {
            skipped += 1;
            continue;
        }
        outcomes.push(ProbeOutcome {
            probe: eta.clone(),
            phi_entails: entails(phi, eta, config)?,
            forgotten_entails: entails(&forgotten, eta, config)?,
        });
    }
    let twice = forget(&forgotten, v, config)?.formula;
    let irrelevance = forgotten.vars().is_disjoint(v) && equivalent(&forgotten, &twice, config)?;
    Ok(PostulateReport {
        forgotten,
        weakening,
        probes: outcomes,
        skipped_probes: skipped,
        irrelevance,
    })
}
