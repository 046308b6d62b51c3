//! Bit-parallel evaluation of CTL formulas over every labeling of a frame.
//!
//! Bit `k` of a block word stands for one labeling; a formula's value at a
//! state is a vector of such words. Temporal operators are evaluated
//! directly as fixpoints over the frame, without the ENF rewrite, so this
//! route is independent of the explicit checker.

use std::collections::HashMap;

use crate::formula::{AtomSet, Formula, Kind};

use super::frames::Frame;
use super::SpaceError;

#[derive(Clone, Copy, Debug)]
enum Op {
    False,
    True,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    EX(usize),
    AX(usize),
    EF(usize),
    AF(usize),
    EG(usize),
    AG(usize),
    EU(usize, usize),
    AU(usize, usize),
}

/// Hash-consed instruction list for a set of root formulas.
pub struct Program {
    ops: Vec<Op>,
    roots: Vec<usize>,
    atoms: usize,
}

impl Program {
    pub fn compile(formulas: &[Formula], alphabet: &AtomSet) -> Result<Program, SpaceError> {
        let mut compiler = Compiler {
            alphabet,
            ops: Vec::new(),
            index: HashMap::new(),
        };
        let mut roots = Vec::with_capacity(formulas.len());
        for f in formulas {
            roots.push(compiler.node(f)?);
        }
        Ok(Program {
            ops: compiler.ops,
            roots,
            atoms: alphabet.len(),
        })
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }
}

struct Compiler<'a> {
    alphabet: &'a AtomSet,
    ops: Vec<Op>,
    index: HashMap<Formula, usize>,
}

impl Compiler<'_> {
    fn node(&mut self, f: &Formula) -> Result<usize, SpaceError> {
        if let Some(&i) = self.index.get(f) {
            return Ok(i);
        }
        let op = match f.kind() {
            Kind::Bottom => Op::False,
            Kind::Top => Op::True,
            Kind::Atom(a) => Op::Atom(
                self.alphabet
                    .index_of(a)
                    .ok_or_else(|| SpaceError::UndeclaredAtom(a.to_string()))?,
            ),
            Kind::Not(a) => Op::Not(self.node(a)?),
            Kind::And(a, b) => Op::And(self.node(a)?, self.node(b)?),
            Kind::Or(a, b) => Op::Or(self.node(a)?, self.node(b)?),
            Kind::Implies(a, b) => Op::Implies(self.node(a)?, self.node(b)?),
            Kind::Iff(a, b) => Op::Iff(self.node(a)?, self.node(b)?),
            Kind::EX(a) => Op::EX(self.node(a)?),
            Kind::AX(a) => Op::AX(self.node(a)?),
            Kind::EF(a) => Op::EF(self.node(a)?),
            Kind::AF(a) => Op::AF(self.node(a)?),
            Kind::EG(a) => Op::EG(self.node(a)?),
            Kind::AG(a) => Op::AG(self.node(a)?),
            Kind::EU(a, b) => Op::EU(self.node(a)?, self.node(b)?),
            Kind::AU(a, b) => Op::AU(self.node(a)?, self.node(b)?),
        };
        let i = self.ops.len();
        self.ops.push(op);
        self.index.insert(f.clone(), i);
        Ok(i)
    }
}

/// Largest number of labeling bits evaluated together.
pub const MAX_BLOCK_BITS: usize = 12;

const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Evaluation geometry of one frame.
pub struct Layout {
    pub states: usize,
    /// Total labeling bits, `states * atoms`.
    pub bits: usize,
    /// Bits handled inside one block.
    pub block_bits: usize,
    pub words: usize,
}

impl Layout {
    pub fn new(states: usize, atoms: usize) -> Layout {
        let bits = states * atoms;
        let block_bits = bits.min(MAX_BLOCK_BITS);
        Layout {
            states,
            bits,
            block_bits,
            words: ((1usize << block_bits) / 64).max(1),
        }
    }

    pub fn blocks(&self) -> u64 {
        1u64 << (self.bits - self.block_bits)
    }

    /// Mask of meaningful bits in word `w`.
    pub fn valid(&self) -> u64 {
        if self.block_bits >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << self.block_bits)) - 1
        }
    }

    /// Labeling index of bit `bit` of word `word` in block `block`.
    pub fn labeling(&self, block: u64, word: usize, bit: u32) -> u64 {
        (block << self.block_bits) | ((word as u64) << 6) | bit as u64
    }
}

/// Scratch space for evaluating one program on one frame.
pub struct Evaluator<'p> {
    program: &'p Program,
    frame: Frame,
    layout: Layout,
    values: Vec<u64>,
    scratch: Vec<u64>,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p Program, frame: Frame) -> Evaluator<'p> {
        let layout = Layout::new(frame.num_states(), program.atoms);
        let width = layout.states * layout.words;
        Evaluator {
            program,
            frame,
            values: vec![0; program.ops.len() * width],
            scratch: vec![0; width],
            layout,
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    fn slot(&self, op: usize, state: usize) -> &[u64] {
        let w = self.layout.words;
        let base = (op * self.layout.states + state) * w;
        &self.values[base..base + w]
    }

    /// Words for root `r` at the initial state, valid after [`run`].
    pub fn root(&self, r: usize) -> &[u64] {
        self.slot(self.program.roots[r], 0)
    }

    fn atom_word(&self, bit: usize, block: u64, word: usize) -> u64 {
        let b = self.layout.block_bits;
        let on = if bit < b {
            if bit < 6 {
                return LOW_PATTERNS[bit];
            }
            (word >> (bit - 6)) & 1 == 1
        } else {
            (block >> (bit - b)) & 1 == 1
        };
        if on {
            u64::MAX
        } else {
            0
        }
    }

    /// Evaluates every op for labeling block `block`.
    pub fn run(&mut self, block: u64) {
        let n = self.layout.states;
        let w = self.layout.words;
        let width = n * w;
        let atoms = self.program.atoms;
        for (i, &op) in self.program.ops.iter().enumerate() {
            let out = i * width;
            match op {
                Op::False => self.values[out..out + width].fill(0),
                Op::True => self.values[out..out + width].fill(u64::MAX),
                Op::Atom(j) => {
                    for s in 0..n {
                        for k in 0..w {
                            self.values[out + s * w + k] = self.atom_word(s * atoms + j, block, k);
                        }
                    }
                }
                Op::Not(a) => self.pointwise(out, a, a, |x, _| !x),
                Op::And(a, b) => self.pointwise(out, a, b, |x, y| x & y),
                Op::Or(a, b) => self.pointwise(out, a, b, |x, y| x | y),
                Op::Implies(a, b) => self.pointwise(out, a, b, |x, y| !x | y),
                Op::Iff(a, b) => self.pointwise(out, a, b, |x, y| !(x ^ y)),
                Op::EX(a) => self.step(out, a, false),
                Op::AX(a) => self.step(out, a, true),
                Op::EF(a) => self.fixpoint(out, None, a, false, true),
                Op::AF(a) => self.fixpoint(out, None, a, true, true),
                Op::EG(a) => self.fixpoint(out, None, a, false, false),
                Op::AG(a) => self.fixpoint(out, None, a, true, false),
                Op::EU(a, b) => self.fixpoint(out, Some(a), b, false, true),
                Op::AU(a, b) => self.fixpoint(out, Some(a), b, true, true),
            }
        }
    }

    fn pointwise(&mut self, out: usize, a: usize, b: usize, f: impl Fn(u64, u64) -> u64) {
        let width = self.layout.states * self.layout.words;
        let (a, b) = (a * width, b * width);
        for k in 0..width {
            self.values[out + k] = f(self.values[a + k], self.values[b + k]);
        }
    }

    /// `out[s] = ⋁/⋀ a[t]` over successors `t` of `s`.
    fn step(&mut self, out: usize, a: usize, universal: bool) {
        let (n, w) = (self.layout.states, self.layout.words);
        let a = a * n * w;
        for s in 0..n {
            for k in 0..w {
                let mut acc = if universal { u64::MAX } else { 0 };
                for t in self.frame.successors(s) {
                    let v = self.values[a + t * w + k];
                    acc = if universal { acc & v } else { acc | v };
                }
                self.values[out + s * w + k] = acc;
            }
        }
    }

    /// Least (`least`) or greatest fixpoint of
    /// `Z[s] = goal[s] ∨ (hold[s] ∧ step(Z)[s])` resp.
    /// `Z[s] = goal[s] ∧ step(Z)[s]`, where `step` is `⋁` or `⋀` over
    /// successors. A missing `hold` means true.
    fn fixpoint(&mut self, out: usize, hold: Option<usize>, goal: usize, universal: bool, least: bool) {
        let (n, w) = (self.layout.states, self.layout.words);
        let width = n * w;
        let goal = goal * width;
        let z = &mut self.scratch;
        z.copy_from_slice(&self.values[goal..goal + width]);
        loop {
            let mut changed = false;
            for s in 0..n {
                for k in 0..w {
                    let mut acc = if universal { u64::MAX } else { 0 };
                    for t in self.frame.successors(s) {
                        let v = z[t * w + k];
                        acc = if universal { acc & v } else { acc | v };
                    }
                    let g = self.values[goal + s * w + k];
                    let next = if least {
                        let h = hold.map_or(u64::MAX, |h| self.values[h * width + s * w + k]);
                        g | (h & acc)
                    } else {
                        g & acc
                    };
                    if next != z[s * w + k] {
                        z[s * w + k] = next;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.values[out..out + width].copy_from_slice(z);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_any;
    use crate::modelcheck::check;
    use crate::modelspace::frames::{initial_frames, to_pointed};

    fn alphabet(names: &[&str]) -> AtomSet {
        AtomSet::from_names(names).unwrap()
    }

    /// Every labeling of every frame: bit-parallel value equals the explicit
    /// checker's answer.
    fn agree(text: &str, atoms: &AtomSet, max_states: usize) {
        let f = parse_any(text).unwrap();
        let program = Program::compile(std::slice::from_ref(&f), atoms).unwrap();
        for frame in initial_frames(max_states) {
            let mut ev = Evaluator::new(&program, frame.clone());
            let valid = ev.layout().valid();
            for block in 0..ev.layout().blocks() {
                ev.run(block);
                let words = ev.root(0).to_vec();
                for (k, word) in words.iter().enumerate() {
                    let word = word & valid;
                    let limit = if valid == u64::MAX { 64 } else { valid.count_ones() };
                    for bit in 0..limit {
                        let labeling = ev.layout().labeling(block, k, bit);
                        let k = to_pointed(&frame, labeling, atoms);
                        assert_eq!(
                            word >> bit & 1 == 1,
                            check(&k, &f).unwrap(),
                            "{text} on\n{}",
                            k.structure.to_model_text()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn agrees_with_explicit_checker() {
        let pq = alphabet(&["p", "q"]);
        for text in [
            "p",
            "!q",
            "p & q | !p",
            "p -> q",
            "p <-> EX q",
            "EX p",
            "AX p",
            "EF p",
            "AF p",
            "EG p",
            "AG p",
            "E[p U q]",
            "A[p U q]",
            "AG (p -> AF q)",
            "EG EF !p",
            "true",
            "false",
        ] {
            agree(text, &pq, 3);
        }
    }

    #[test]
    fn wide_frames_span_several_words() {
        // 3 atoms on 3 states gives 9 labeling bits: 8 words per block.
        let abc = alphabet(&["a", "b", "c"]);
        agree("E[a U b & c] | AX !c", &abc, 3);
        let layout = Layout::new(3, 3);
        assert_eq!((layout.block_bits, layout.words, layout.blocks()), (9, 8, 1));
        let layout = Layout::new(4, 4);
        assert_eq!((layout.block_bits, layout.words, layout.blocks()), (12, 64, 16));
    }

    #[test]
    fn undeclared_atoms_are_rejected() {
        let f = parse_any("p & r").unwrap();
        assert!(matches!(
            Program::compile(&[f], &alphabet(&["p"])),
            Err(SpaceError::UndeclaredAtom(a)) if a == "r"
        ));
    }
}
