//! CTL formulas over a finite atom alphabet.
//!
//! Formulas are immutable, reference-counted trees. Subterms may be shared,
//! so a formula is really a DAG; every node caches its structural hash and
//! its tree size, which keeps equality checks and deduplication cheap even
//! for the large disjunctions produced by forgetting.

mod parser;
mod printer;
mod simplify;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock, Weak};

use thiserror::Error;

pub use parser::{parse, parse_any};
pub use simplify::simplify;

/// Identifiers the formula grammar reserves for itself.
pub const KEYWORDS: &[&str] = &[
    "true", "false", "EX", "AX", "EF", "AF", "EG", "AG", "E", "A", "U",
];

/// Prefix of atoms generated internally; user atoms can never start with it.
pub const FRESH_PREFIX: &str = "_fresh";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("invalid atom name `{0}`")]
    InvalidAtomName(String),
    #[error("formula is not propositional: {0}")]
    NotPropositional(String),
}

/// A propositional variable, compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Atom, FormulaError> {
        let mut chars = name.chars();
        let valid = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !KEYWORDS.contains(&name);
        if valid {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(FormulaError::InvalidAtomName(name.to_string()))
        }
    }

    /// The `index`-th reserved fresh atom (`_fresh0`, `_fresh1`, ...).
    pub fn fresh(index: usize) -> Atom {
        Atom(Arc::from(format!("{FRESH_PREFIX}{index}").as_str()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_fresh(&self) -> bool {
        self.0.starts_with(FRESH_PREFIX)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An ordered set of atoms. Iteration order is the name order, which fixes
/// the order of literals in characterizing formulas and of labeling bits in
/// the model enumeration.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSet(BTreeSet<Atom>);

impl AtomSet {
    pub fn new() -> AtomSet {
        AtomSet::default()
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<AtomSet, FormulaError> {
        names.iter().map(|n| Atom::new(n.as_ref())).collect()
    }

    /// Parses a comma- or whitespace-separated list of atom names.
    pub fn parse_list(text: &str) -> Result<AtomSet, FormulaError> {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(Atom::new)
            .collect()
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        self.0.insert(atom)
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        self.0.remove(atom)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.0.iter()
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Position of `atom` in iteration order.
    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.0.iter().position(|a| a == atom)
    }

    /// All subsets, in binary-counter order over the iteration order.
    pub fn subsets(&self) -> Vec<AtomSet> {
        let atoms: Vec<&Atom> = self.iter().collect();
        (0u64..1 << atoms.len())
            .map(|mask| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, a)| (*a).clone())
                    .collect()
            })
            .collect()
    }

    /// The first reserved fresh atom not in this set.
    pub fn fresh_atom(&self) -> Atom {
        (0..)
            .map(Atom::fresh)
            .find(|a| !self.contains(a))
            .expect("unbounded supply of fresh atoms")
    }
}

impl FromIterator<Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        AtomSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a AtomSet {
    type Item = &'a Atom;
    type IntoIter = std::collections::btree_set::Iter<'a, Atom>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Atom::name).collect();
        f.write_str(&names.join(","))
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Syntax tree node kinds.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Kind {
    Bottom,
    Top,
    Atom(Atom),
    Not(Formula),
    And(Formula, Formula),
    Or(Formula, Formula),
    Implies(Formula, Formula),
    Iff(Formula, Formula),
    EX(Formula),
    AX(Formula),
    EF(Formula),
    AF(Formula),
    EG(Formula),
    AG(Formula),
    EU(Formula, Formula),
    AU(Formula, Formula),
}

impl Kind {
    pub fn children(&self) -> Vec<&Formula> {
        use Kind::*;
        match self {
            Bottom | Top | Atom(_) => vec![],
            Not(a) | EX(a) | AX(a) | EF(a) | AF(a) | EG(a) | AG(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | EU(a, b) | AU(a, b) => vec![a, b],
        }
    }

    fn is_temporal(&self) -> bool {
        use Kind::*;
        matches!(
            self,
            EX(_) | AX(_) | EF(_) | AF(_) | EG(_) | AG(_) | EU(..) | AU(..)
        )
    }
}

struct Node {
    kind: Kind,
    hash: u64,
    size: u64,
}

/// A CTL formula.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

/// Shallow identity of a node: its tag, atom, and child addresses.
#[derive(PartialEq, Eq, Hash)]
struct ShallowKey {
    tag: std::mem::Discriminant<Kind>,
    atom: Option<Atom>,
    children: [usize; 2],
}

impl ShallowKey {
    fn of(kind: &Kind) -> ShallowKey {
        let mut children = [0; 2];
        for (slot, c) in children.iter_mut().zip(kind.children()) {
            *slot = c.node_id();
        }
        ShallowKey {
            tag: std::mem::discriminant(kind),
            atom: match kind {
                Kind::Atom(a) => Some(a.clone()),
                _ => None,
            },
            children,
        }
    }
}

/// Table of live nodes. Every formula is built through it, so structurally
/// equal formulas share one node and equality is pointer comparison.
/// Children of a live entry are alive, so their addresses in its key cannot
/// be reused; dead entries are swept when the table doubles.
struct Interner {
    live: HashMap<ShallowKey, Weak<Node>>,
    sweep_at: usize,
}

fn interner() -> &'static Mutex<Interner> {
    static TABLE: OnceLock<Mutex<Interner>> = OnceLock::new();
    TABLE.get_or_init(|| {
        Mutex::new(Interner {
            live: HashMap::new(),
            sweep_at: 1 << 12,
        })
    })
}

impl Formula {
    pub fn new(kind: Kind) -> Formula {
        let key = ShallowKey::of(&kind);
        let mut table = interner().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(node) = table.live.get(&key).and_then(Weak::upgrade) {
            return Formula(node);
        }
        let mut hasher = DefaultHasher::new();
        kind.hash(&mut hasher);
        let size = kind
            .children()
            .iter()
            .fold(1u64, |acc, c| acc.saturating_add(c.size()));
        let node = Arc::new(Node {
            hash: hasher.finish(),
            size,
            kind,
        });
        table.live.insert(key, Arc::downgrade(&node));
        if table.live.len() >= table.sweep_at {
            table.live.retain(|_, w| w.strong_count() > 0);
            table.sweep_at = (table.live.len() * 2).max(1 << 12);
        }
        Formula(node)
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Number of nodes of the formula read as a tree.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Address of the shared node; stable while the formula is alive.
    pub fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn top() -> Formula {
        Formula::new(Kind::Top)
    }

    pub fn bottom() -> Formula {
        Formula::new(Kind::Bottom)
    }

    pub fn atom(atom: Atom) -> Formula {
        Formula::new(Kind::Atom(atom))
    }

    /// Atom from a name; panics on an invalid name. Intended for tests and
    /// literals in code.
    pub fn var(name: &str) -> Formula {
        Formula::atom(Atom::new(name).expect("valid atom name"))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::new(Kind::Not(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::new(Kind::And(a, b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::new(Kind::Or(a, b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::new(Kind::Implies(a, b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::new(Kind::Iff(a, b))
    }

    pub fn ex(a: Formula) -> Formula {
        Formula::new(Kind::EX(a))
    }

    pub fn ax(a: Formula) -> Formula {
        Formula::new(Kind::AX(a))
    }

    pub fn ef(a: Formula) -> Formula {
        Formula::new(Kind::EF(a))
    }

    pub fn af(a: Formula) -> Formula {
        Formula::new(Kind::AF(a))
    }

    pub fn eg(a: Formula) -> Formula {
        Formula::new(Kind::EG(a))
    }

    pub fn ag(a: Formula) -> Formula {
        Formula::new(Kind::AG(a))
    }

    pub fn eu(a: Formula, b: Formula) -> Formula {
        Formula::new(Kind::EU(a, b))
    }

    pub fn au(a: Formula, b: Formula) -> Formula {
        Formula::new(Kind::AU(a, b))
    }

    /// Conjunction; `true` when empty. See [`Formula::junction`] for shape.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        Formula::junction(items.into_iter().collect(), Formula::and).unwrap_or_else(Formula::top)
    }

    /// Disjunction; `false` when empty.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        Formula::junction(items.into_iter().collect(), Formula::or).unwrap_or_else(Formula::bottom)
    }

    /// Short lists fold to the left, as the parser reads them. Long ones are
    /// split into balanced halves so that nesting stays logarithmic; forgetting
    /// results can have thousands of disjuncts.
    fn junction(mut items: Vec<Formula>, op: fn(Formula, Formula) -> Formula) -> Option<Formula> {
        const FLAT: usize = 16;
        if items.len() <= FLAT {
            return items.into_iter().reduce(op);
        }
        let right = items.split_off(items.len() / 2);
        let left = Formula::junction(items, op)?;
        Some(op(left, Formula::junction(right, op)?))
    }

    pub fn is_top(&self) -> bool {
        matches!(self.kind(), Kind::Top)
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self.kind(), Kind::Bottom)
    }

    /// Atoms occurring in the formula.
    pub fn vars(&self) -> AtomSet {
        let mut out = AtomSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.node_id()) {
                continue;
            }
            if let Kind::Atom(a) = f.kind() {
                out.insert(a.clone());
            }
            stack.extend(f.kind().children());
        }
        out
    }

    /// True when no temporal operator occurs.
    pub fn is_propositional(&self) -> bool {
        !self.kind().is_temporal() && self.kind().children().iter().all(|c| c.is_propositional())
    }

    /// Nesting depth of operators; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        self.kind()
            .children()
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Rebuilds the formula bottom-up, applying `f` to every rebuilt node.
    /// Shared subterms are visited once.
    pub fn map_bottom_up(&self, f: &mut dyn FnMut(Formula) -> Formula) -> Formula {
        let mut memo = std::collections::HashMap::new();
        self.map_rec(f, &mut memo)
    }

    fn map_rec(
        &self,
        f: &mut dyn FnMut(Formula) -> Formula,
        memo: &mut std::collections::HashMap<usize, Formula>,
    ) -> Formula {
        if let Some(done) = memo.get(&self.node_id()) {
            return done.clone();
        }
        use Kind::*;
        let mut go = |x: &Formula, f: &mut dyn FnMut(Formula) -> Formula| x.map_rec(f, memo);
        let rebuilt = match self.kind() {
            Bottom | Top | Atom(_) => self.clone(),
            Not(a) => Formula::not(go(a, f)),
            EX(a) => Formula::ex(go(a, f)),
            AX(a) => Formula::ax(go(a, f)),
            EF(a) => Formula::ef(go(a, f)),
            AF(a) => Formula::af(go(a, f)),
            EG(a) => Formula::eg(go(a, f)),
            AG(a) => Formula::ag(go(a, f)),
            And(a, b) => {
                let a = go(a, f);
                Formula::and(a, go(b, f))
            }
            Or(a, b) => {
                let a = go(a, f);
                Formula::or(a, go(b, f))
            }
            Implies(a, b) => {
                let a = go(a, f);
                Formula::implies(a, go(b, f))
            }
            Iff(a, b) => {
                let a = go(a, f);
                Formula::iff(a, go(b, f))
            }
            EU(a, b) => {
                let a = go(a, f);
                Formula::eu(a, go(b, f))
            }
            AU(a, b) => {
                let a = go(a, f);
                Formula::au(a, go(b, f))
            }
        };
        let out = f(rebuilt);
        memo.insert(self.node_id(), out.clone());
        out
    }

    /// Replaces every occurrence of `atom` by `replacement`.
    pub fn substitute(&self, atom: &Atom, replacement: &Formula) -> Formula {
        self.map_bottom_up(&mut |node| match node.kind() {
            Kind::Atom(a) if a == atom => replacement.clone(),
            _ => node,
        })
    }

    /// Rewrites into existential normal form: only `false`, `true`, atoms,
    /// `!`, `|`, `EX`, `EG` and `E[_ U _]` remain.
    pub fn to_enf(&self) -> Formula {
        use Kind::*;
        let not = Formula::not;
        self.map_bottom_up(&mut |node| match node.kind() {
            And(a, b) => not(Formula::or(not(a.clone()), not(b.clone()))),
            Implies(a, b) => Formula::or(not(a.clone()), b.clone()),
            Iff(a, b) => {
                let forward = Formula::or(not(a.clone()), b.clone());
                let backward = Formula::or(not(b.clone()), a.clone());
                not(Formula::or(not(forward), not(backward)))
            }
            AX(a) => not(Formula::ex(not(a.clone()))),
            EF(a) => Formula::eu(Formula::top(), a.clone()),
            AG(a) => not(Formula::eu(Formula::top(), not(a.clone()))),
            AF(a) => not(Formula::eg(not(a.clone()))),
            AU(a, b) => {
                let not_b = not(b.clone());
                let both = not(Formula::or(a.clone(), b.clone()));
                not(Formula::or(
                    Formula::eu(not_b.clone(), both),
                    Formula::eg(not_b),
                ))
            }
            _ => node,
        })
    }

    /// True when the formula only uses the existential-normal-form connectives.
    pub fn is_enf(&self) -> bool {
        use Kind::*;
        let here = matches!(
            self.kind(),
            Bottom | Top | Atom(_) | Not(_) | Or(..) | EX(_) | EG(_) | EU(..)
        );
        here && self.kind().children().iter().all(|c| c.is_enf())
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        // Nodes are interned.
        self.ptr_eq(other)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Formula {
        Formula::var(name)
    }

    #[test]
    fn atom_names_are_validated() {
        assert!(Atom::new("se").is_ok());
        assert!(Atom::new("x_1").is_ok());
        assert!(Atom::new("1x").is_err());
        assert!(Atom::new("").is_err());
        assert!(Atom::new("EX").is_err());
        assert!(Atom::new("_fresh0").is_err());
        assert!(Atom::fresh(0).is_fresh());
    }

    #[test]
    fn vars_examples() {
        let f = Formula::and(v("d"), Formula::ef(v("se")));
        assert_eq!(f.vars(), AtomSet::from_names(&["d", "se"]).unwrap());
        assert!(Formula::top().vars().is_empty());
        let g = Formula::ag(Formula::implies(v("se"), Formula::ax(v("d"))));
        assert_eq!(g.vars(), AtomSet::from_names(&["se", "d"]).unwrap());
    }

    #[test]
    fn substitute_examples() {
        let p = Atom::new("p").unwrap();
        let r = Atom::new("r").unwrap();
        let pq = Formula::and(v("p"), v("q"));
        assert_eq!(
            pq.substitute(&p, &Formula::top()),
            Formula::and(Formula::top(), v("q"))
        );
        assert_eq!(pq.substitute(&r, &Formula::bottom()), pq);
        assert_eq!(Formula::ex(v("p")).substitute(&p, &v("q")), Formula::ex(v("q")));
    }

    #[test]
    fn enf_examples() {
        assert_eq!(
            Formula::ax(v("p")).to_enf(),
            Formula::not(Formula::ex(Formula::not(v("p"))))
        );
        assert_eq!(
            Formula::ef(v("p")).to_enf(),
            Formula::eu(Formula::top(), v("p"))
        );
        assert_eq!(v("p").to_enf(), v("p"));
        let all = parse_any("A[p U q] <-> AG (p -> AF q) & EX r").unwrap();
        assert!(all.to_enf().is_enf());
    }

    #[test]
    fn size_counts_tree_nodes() {
        let p = v("p");
        let f = Formula::and(p.clone(), p);
        assert_eq!(f.size(), 3);
    }

    #[test]
    fn subsets_and_fresh() {
        let s = AtomSet::from_names(&["p", "q"]).unwrap();
        assert_eq!(s.subsets().len(), 4);
        let mut t = s.clone();
        t.insert(Atom::fresh(0));
        assert_eq!(t.fresh_atom(), Atom::fresh(1));
        assert_eq!(s.fresh_atom(), Atom::fresh(0));
    }
}
