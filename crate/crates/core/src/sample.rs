//! Seeded random formulas for property checks and probe families.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::formula::{Atom, AtomSet, Formula};

/// Random formula generator over a fixed atom list.
pub struct FormulaSampler {
    rng: StdRng,
    atoms: Vec<Atom>,
    temporal: bool,
}

impl FormulaSampler {
    pub fn new(atoms: &AtomSet, seed: u64) -> FormulaSampler {
        FormulaSampler {
            rng: StdRng::seed_from_u64(seed),
            atoms: atoms.iter().cloned().collect(),
            temporal: true,
        }
    }

    /// Only Boolean connectives.
    pub fn propositional(mut self) -> FormulaSampler {
        self.temporal = false;
        self
    }

    pub fn rng(&mut self) -> &mut StdRng {
        &mut self.rng
    }

    fn leaf(&mut self) -> Formula {
        if self.atoms.is_empty() || self.rng.gen_ratio(1, 8) {
            return if self.rng.gen() { Formula::top() } else { Formula::bottom() };
        }
        let i = self.rng.gen_range(0..self.atoms.len());
        Formula::atom(self.atoms[i].clone())
    }

    /// A formula of depth at most `depth`.
    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_ratio(1, 4) {
            return self.leaf();
        }
        let choices = if self.temporal { 15 } else { 5 };
        let d = depth - 1;
        match self.rng.gen_range(0..choices) {
            0 => Formula::not(self.formula(d)),
            1 => Formula::and(self.formula(d), self.formula(d)),
            2 => Formula::or(self.formula(d), self.formula(d)),
            3 => Formula::implies(self.formula(d), self.formula(d)),
            4 => Formula::iff(self.formula(d), self.formula(d)),
            5 => Formula::ex(self.formula(d)),
            6 => Formula::ax(self.formula(d)),
            7 => Formula::ef(self.formula(d)),
            8 => Formula::af(self.formula(d)),
            9 => Formula::eg(self.formula(d)),
            10 => Formula::ag(self.formula(d)),
            11 => Formula::eu(self.formula(d), self.formula(d)),
            12 => Formula::au(self.formula(d), self.formula(d)),
            13 => Formula::and(self.leaf(), self.formula(d)),
            _ => Formula::or(self.leaf(), self.formula(d)),
        }
    }

    /// A subset of `set`, each member kept with probability one half.
    pub fn subset(&mut self, set: &AtomSet) -> AtomSet {
        set.iter().filter(|_| self.rng.gen()).cloned().collect()
    }
}

/// `count` probe formulas over `atoms` of depth at most `depth`.
pub fn random_probes(atoms: &AtomSet, count: usize, depth: usize, seed: u64) -> Vec<Formula> {
    let mut s = FormulaSampler::new(atoms, seed);
    (0..count).map(|_| s.formula(depth)).collect()
}

/// Every formula over `atoms` up to `depth`, built from the full operator
/// set. Grows fast: use small atom sets and depth at most 2.
pub fn all_formulas(atoms: &AtomSet, depth: usize) -> Vec<Formula> {
    let mut levels: Vec<Formula> = [Formula::top(), Formula::bottom()]
        .into_iter()
        .chain(atoms.iter().cloned().map(Formula::atom))
        .collect();
    for _ in 0..depth {
        let prev = levels.clone();
        let mut next = prev.clone();
        for a in &prev {
            next.push(Formula::not(a.clone()));
            next.push(Formula::ex(a.clone()));
            next.push(Formula::ax(a.clone()));
            next.push(Formula::ef(a.clone()));
            next.push(Formula::af(a.clone()));
            next.push(Formula::eg(a.clone()));
            next.push(Formula::ag(a.clone()));
            for b in &prev {
                next.push(Formula::and(a.clone(), b.clone()));
                next.push(Formula::or(a.clone(), b.clone()));
                next.push(Formula::eu(a.clone(), b.clone()));
                next.push(Formula::au(a.clone(), b.clone()));
            }
        }
        levels = next;
    }
    levels
}
