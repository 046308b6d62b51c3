//! Bounded space of initial K-structures used as the semantic oracle.
//!
//! A candidate is a frame (total relation on `b1..bj`, `b1` initial,
//! satisfying the initial-state condition) plus a labeling over the
//! alphabet. Candidates are ordered by state count, frame rank and
//! labeling index, where bit `s * |alphabet| + j` of the labeling says
//! that state `s` carries the `j`-th atom in sorted order.
//!
//! Every answer here is relative to the bound: entailment within it is
//! sound for refuting, not complete for proving.

mod batch;
pub mod canon;
pub mod frames;

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::formula::{AtomSet, Formula};
use crate::kripke::PointedStructure;

pub use batch::{Layout, MAX_BLOCK_BITS};
use batch::{Evaluator, Program};
use frames::{initial_frames, raw_candidate_count, to_pointed, Frame};

pub const DEFAULT_MAX_STATES: usize = 3;
/// Default ceiling on raw candidates, `Σ (2^j - 1)^j · 2^(|A|·j)`.
pub const CANDIDATE_CAP: u128 = 1 << 32;
/// Labeling bits per frame the enumerator can index at all.
pub const MAX_LABEL_BITS: usize = 48;
/// Bits in a [`ModelSet`] before batch queries refuse the space.
pub const MAX_SET_BITS: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("max_states must be at least 1")]
    NoStates,
    #[error(
        "bound admits {count} candidate structures, above the cap of {cap}; \
         lower --max-states or pass --allow-large"
    )]
    CapExceeded { count: u128, cap: u128 },
    #[error("{bits} labeling bits per structure is beyond the enumerator")]
    TooWide { bits: usize },
    #[error("the space has {0} candidates, too many for explicit model sets")]
    TooManyForSets(u64),
    #[error("atom `{0}` is not in the alphabet")]
    UndeclaredAtom(String),
}

/// Alphabet and state bound of the enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniverseConfig {
    pub alphabet: AtomSet,
    pub max_states: usize,
    /// Emit one structure per plain-bisimulation class.
    pub dedupe: bool,
    /// Skip the candidate cap.
    pub allow_large: bool,
}

impl UniverseConfig {
    pub fn new(alphabet: AtomSet, max_states: usize) -> UniverseConfig {
        UniverseConfig {
            alphabet,
            max_states,
            dedupe: false,
            allow_large: false,
        }
    }

    pub fn with_dedupe(mut self, dedupe: bool) -> UniverseConfig {
        self.dedupe = dedupe;
        self
    }

    pub fn with_alphabet(&self, alphabet: AtomSet) -> UniverseConfig {
        UniverseConfig {
            alphabet,
            ..self.clone()
        }
    }

    pub fn with_max_states(&self, max_states: usize) -> UniverseConfig {
        UniverseConfig {
            max_states,
            ..self.clone()
        }
    }

    pub fn raw_candidates(&self) -> u128 {
        raw_candidate_count(self.max_states, self.alphabet.len())
    }

    pub fn validate(&self) -> Result<(), SpaceError> {
        if self.max_states == 0 {
            return Err(SpaceError::NoStates);
        }
        let bits = self.max_states * self.alphabet.len();
        if bits > MAX_LABEL_BITS {
            return Err(SpaceError::TooWide { bits });
        }
        let count = self.raw_candidates();
        if count > CANDIDATE_CAP && !self.allow_large {
            return Err(SpaceError::CapExceeded {
                count,
                cap: CANDIDATE_CAP,
            });
        }
        Ok(())
    }

    fn require_vocabulary(&self, formulas: &[&Formula]) -> Result<(), SpaceError> {
        for f in formulas {
            if let Some(a) = f.vars().iter().find(|a| !self.alphabet.contains(a)) {
                return Err(SpaceError::UndeclaredAtom(a.to_string()));
            }
        }
        Ok(())
    }
}

/// A candidate by position: frame index and labeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate {
    pub frame: usize,
    pub labeling: u64,
}

/// The frames of a bound, ready for scans.
pub struct Universe {
    config: UniverseConfig,
    frames: Vec<Frame>,
}

impl Universe {
    pub fn new(config: &UniverseConfig) -> Result<Universe, SpaceError> {
        config.validate()?;
        if config.max_states > 4 {
            log::warn!(
                "max_states = {} enumerates {} raw candidates; expect long runtimes",
                config.max_states,
                config.raw_candidates()
            );
        }
        Ok(Universe {
            config: config.clone(),
            frames: initial_frames(config.max_states),
        })
    }

    pub fn config(&self) -> &UniverseConfig {
        &self.config
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    fn atoms(&self) -> usize {
        self.config.alphabet.len()
    }

    pub fn labelings(&self, frame: usize) -> u64 {
        1u64 << (self.frames[frame].num_states() * self.atoms())
    }

    pub fn pointed(&self, c: Candidate) -> PointedStructure {
        to_pointed(&self.frames[c.frame], c.labeling, &self.config.alphabet)
    }

    /// Canonical key of `c`'s class under bisimulation restricted to `kept`.
    pub fn class_key(&self, c: Candidate, kept: &AtomSet) -> Vec<u64> {
        let mask = self
            .config
            .alphabet
            .iter()
            .enumerate()
            .filter(|(_, a)| kept.contains(a))
            .fold(0u64, |m, (j, _)| m | 1 << j);
        canon::class_key(&self.frames[c.frame], c.labeling, self.atoms(), mask)
    }

    fn compile(&self, formulas: &[Formula]) -> Result<Program, SpaceError> {
        let refs: Vec<&Formula> = formulas.iter().collect();
        self.config.require_vocabulary(&refs)?;
        Program::compile(formulas, &self.config.alphabet)
    }

    /// Runs `visit` on every (frame, block) with all roots evaluated. The
    /// per-frame results come back in frame order.
    fn scan<T, F>(&self, program: &Program, visit: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &Evaluator, u64, &mut T) + Sync,
        T: Default,
    {
        self.frames
            .par_iter()
            .enumerate()
            .map(|(i, frame)| {
                let mut ev = Evaluator::new(program, frame.clone());
                let mut acc = T::default();
                for block in 0..ev.layout().blocks() {
                    ev.run(block);
                    visit(i, &ev, block, &mut acc);
                }
                acc
            })
            .collect()
    }

    /// Candidates satisfying every formula, in enumeration order. Plain
    /// bisimulation duplicates are kept.
    pub fn models(&self, formulas: &[Formula]) -> Result<Vec<Candidate>, SpaceError> {
        let program = self.compile(formulas)?;
        let per_frame: Vec<Vec<Candidate>> = self.scan(&program, |frame, ev, block, out: &mut Vec<_>| {
            let layout = ev.layout();
            for k in 0..layout.words {
                let mut word = layout.valid();
                for r in 0..program.num_roots() {
                    word &= ev.root(r)[k];
                }
                while word != 0 {
                    let bit = word.trailing_zeros();
                    word &= word - 1;
                    out.push(Candidate {
                        frame,
                        labeling: layout.labeling(block, k, bit),
                    });
                }
            }
        });
        Ok(per_frame.into_iter().flatten().collect())
    }

    /// Whether some candidate satisfies `formula`. Stops early.
    pub fn satisfiable(&self, formula: &Formula) -> Result<bool, SpaceError> {
        let program = self.compile(std::slice::from_ref(formula))?;
        let found = AtomicBool::new(false);
        self.frames.par_iter().for_each(|frame| {
            if found.load(Ordering::Relaxed) {
                return;
            }
            let mut ev = Evaluator::new(&program, frame.clone());
            for block in 0..ev.layout().blocks() {
                ev.run(block);
                let valid = ev.layout().valid();
                if ev.root(0).iter().any(|w| w & valid != 0) {
                    found.store(true, Ordering::Relaxed);
                    return;
                }
                if found.load(Ordering::Relaxed) {
                    return;
                }
            }
        });
        Ok(found.into_inner())
    }

    /// Keeps the first candidate of each plain-bisimulation class.
    pub fn dedupe(&self, candidates: Vec<Candidate>) -> Vec<Candidate> {
        let all = self.config.alphabet.clone();
        let mut seen = HashSet::new();
        candidates
            .into_iter()
            .filter(|&c| seen.insert(self.class_key(c, &all)))
            .collect()
    }

    /// Number of candidates in the space.
    pub fn size(&self) -> u64 {
        (0..self.frames.len()).map(|f| self.labelings(f)).sum()
    }

    /// Every candidate, in order.
    pub fn candidates(&self) -> impl Iterator<Item = Candidate> + '_ {
        (0..self.frames.len()).flat_map(move |frame| {
            (0..self.labelings(frame)).map(move |labeling| Candidate { frame, labeling })
        })
    }

    /// Bitsets of models, one per formula, over [`Universe::candidates`]
    /// order.
    pub fn model_sets(&self, formulas: &[Formula]) -> Result<Vec<ModelSet>, SpaceError> {
        let size = self.size();
        if size > MAX_SET_BITS {
            return Err(SpaceError::TooManyForSets(size));
        }
        let mut offsets = Vec::with_capacity(self.frames.len());
        let mut total = 0u64;
        for f in 0..self.frames.len() {
            offsets.push(total);
            total += self.labelings(f);
        }
        let mut sets: Vec<ModelSet> = formulas.iter().map(|_| ModelSet::empty(size)).collect();
        const CHUNK: usize = 256;
        for (ci, chunk) in formulas.chunks(CHUNK).enumerate() {
            let base = ci * CHUNK;
            let program = self.compile(chunk)?;
            let hits: Vec<Vec<(usize, u64)>> = self.scan(&program, |frame, ev, block, out: &mut Vec<_>| {
                let layout = ev.layout();
                let valid = layout.valid();
                for r in 0..program.num_roots() {
                    for (k, &w) in ev.root(r).iter().enumerate() {
                        let mut word = w & valid;
                        while word != 0 {
                            let bit = word.trailing_zeros();
                            word &= word - 1;
                            out.push((r, offsets[frame] + layout.labeling(block, k, bit)));
                        }
                    }
                }
            });
            for (r, index) in hits.into_iter().flatten() {
                sets[base + r].insert(index);
            }
        }
        Ok(sets)
    }

    /// Candidate at position `index` of [`Universe::candidates`].
    pub fn candidate_at(&self, mut index: u64) -> Candidate {
        for frame in 0..self.frames.len() {
            let n = self.labelings(frame);
            if index < n {
                return Candidate {
                    frame,
                    labeling: index,
                };
            }
            index -= n;
        }
        panic!("candidate index out of range")
    }
}

/// A set of candidates of one universe as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModelSet {
    size: u64,
    words: Vec<u64>,
}

impl ModelSet {
    pub fn empty(size: u64) -> ModelSet {
        ModelSet {
            size,
            words: vec![0; size.div_ceil(64) as usize],
        }
    }

    pub fn full(size: u64) -> ModelSet {
        let mut s = ModelSet::empty(size);
        for i in 0..size {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: u64) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: u64) -> bool {
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &ModelSet) -> ModelSet {
        self.zip(other, |a, b| a & b)
    }

    fn zip(&self, other: &ModelSet, f: impl Fn(u64, u64) -> u64) -> ModelSet {
        ModelSet {
            size: self.size,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.size).filter(|&i| self.contains(i))
    }
}

/// Every initial K-structure within the bound, in enumeration order.
pub fn enumerate_initial(
    config: &UniverseConfig,
) -> Result<impl Iterator<Item = PointedStructure>, SpaceError> {
    let universe = Universe::new(config)?;
    let all = config.alphabet.clone();
    let dedupe = config.dedupe;
    let mut seen = HashSet::new();
    let candidates: Vec<Candidate> = universe.candidates().collect();
    Ok(candidates.into_iter().filter_map(move |c| {
        if dedupe && !seen.insert(universe.class_key(c, &all)) {
            return None;
        }
        Some(universe.pointed(c))
    }))
}

/// Models of `phi` within the bound, in enumeration order.
pub fn models_of(phi: &Formula, config: &UniverseConfig) -> Result<Vec<PointedStructure>, SpaceError> {
    let universe = Universe::new(config)?;
    let mut found = universe.models(std::slice::from_ref(phi))?;
    if config.dedupe {
        found = universe.dedupe(found);
    }
    Ok(found.into_iter().map(|c| universe.pointed(c)).collect())
}

/// `Mod(φ) ⊆ Mod(ψ)` within the bound.
pub fn entails(phi: &Formula, psi: &Formula, config: &UniverseConfig) -> Result<bool, SpaceError> {
    let universe = Universe::new(config)?;
    let witness = Formula::and(phi.clone(), Formula::not(psi.clone()));
    Ok(!universe.satisfiable(&witness)?)
}

/// Same models within the bound.
pub fn equivalent(phi: &Formula, psi: &Formula, config: &UniverseConfig) -> Result<bool, SpaceError> {
    let universe = Universe::new(config)?;
    let witness = Formula::not(Formula::iff(phi.clone(), psi.clone()));
    Ok(!universe.satisfiable(&witness)?)
}

/// `φ` is irrelevant to `v`: equivalent to forgetting `v` from it.
pub fn irrelevant(phi: &Formula, v: &AtomSet, config: &UniverseConfig) -> Result<bool, crate::forgetting::ForgetError> {
    let forgotten = crate::forgetting::forget(phi, v, config)?;
    Ok(equivalent(phi, &forgotten.formula, config)?)
}
