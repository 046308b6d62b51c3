//! Finite Kripke structures with a designated initial state.
//!
//! A structure is total (every state has a successor) and, wherever initial
//! K-structure semantics is needed, satisfies the initial-state condition:
//! one infinite path from the initial state visits every state.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{Atom, AtomSet, FormulaError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("state `{0}` has no outgoing transition")]
    NotTotal(String),
    #[error("no single path from initial state `{0}` visits every state")]
    InitialCondition(String),
    #[error("atom `{0}` is not declared in the alphabet")]
    UndeclaredAtom(String),
    #[error("state `{0}` is not declared")]
    UndeclaredState(String),
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("pointed structure is not initial: focus `{0}` is not the initial state")]
    NotInitial(String),
    #[error(transparent)]
    Atom(#[from] FormulaError),
}

/// A finite, total, labeled transition system with an initial state.
///
/// States are indexed by declaration order; successor lists are sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KripkeStructure {
    names: Vec<String>,
    succ: Vec<Vec<usize>>,
    labels: Vec<AtomSet>,
    initial: usize,
    alphabet: AtomSet,
}

impl KripkeStructure {
    /// Builds a structure, checking totality and that labels and transition
    /// endpoints are declared. The initial-state condition is not enforced
    /// here; see [`KripkeStructure::require_initial_condition`].
    pub fn new(
        names: Vec<String>,
        transitions: &[(usize, usize)],
        labels: Vec<AtomSet>,
        initial: usize,
        alphabet: AtomSet,
    ) -> Result<KripkeStructure, KripkeError> {
        let n = names.len();
        let mut seen = HashMap::new();
        for name in &names {
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(KripkeError::DuplicateState(name.clone()));
            }
        }
        if initial >= n {
            return Err(KripkeError::UndeclaredState(format!("#{initial}")));
        }
        if labels.len() != n {
            return Err(KripkeError::Format {
                line: 0,
                message: format!("expected {n} labels, got {}", labels.len()),
            });
        }
        for label in &labels {
            if let Some(atom) = label.iter().find(|a| !alphabet.contains(a)) {
                return Err(KripkeError::UndeclaredAtom(atom.to_string()));
            }
        }
        let mut succ = vec![Vec::new(); n];
        for &(from, to) in transitions {
            if from >= n || to >= n {
                return Err(KripkeError::UndeclaredState(format!("#{}", from.max(to))));
            }
            succ[from].push(to);
        }
        for (i, list) in succ.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.is_empty() {
                return Err(KripkeError::NotTotal(names[i].clone()));
            }
        }
        Ok(KripkeStructure {
            names,
            succ,
            labels,
            initial,
            alphabet,
        })
    }

    /// Builds a structure from trusted parts (sorted, nonempty successor
    /// lists and labels inside the alphabet).
    pub(crate) fn from_parts(
        names: Vec<String>,
        succ: Vec<Vec<usize>>,
        labels: Vec<AtomSet>,
        initial: usize,
        alphabet: AtomSet,
    ) -> KripkeStructure {
        debug_assert!(succ.iter().all(|s| !s.is_empty()));
        KripkeStructure {
            names,
            succ,
            labels,
            initial,
            alphabet,
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> std::ops::Range<usize> {
        0..self.names.len()
    }

    pub fn name(&self, state: usize) -> &str {
        &self.names[state]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn successors(&self, state: usize) -> &[usize] {
        &self.succ[state]
    }

    pub fn label(&self, state: usize) -> &AtomSet {
        &self.labels[state]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet(&self) -> &AtomSet {
        &self.alphabet
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(s, list)| list.iter().map(move |&t| (s, t)))
    }

    /// Reachability matrix (reflexive-transitive closure of the transitions).
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.num_states();
        (0..n)
            .map(|start| {
                let mut seen = vec![false; n];
                seen[start] = true;
                let mut stack = vec![start];
                while let Some(s) = stack.pop() {
                    for &t in &self.succ[s] {
                        if !seen[t] {
                            seen[t] = true;
                            stack.push(t);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    /// Whether some infinite path from the initial state visits every state.
    ///
    /// Such a path exists iff every state is reachable from the initial
    /// state and the strongly connected components form a chain, i.e. any
    /// two states are ordered by reachability. Within a component the path
    /// can visit everything before moving on; totality keeps it infinite.
    pub fn check_initial_condition(&self) -> bool {
        let reach = self.reachability();
        let n = self.num_states();
        reach[self.initial].iter().all(|&r| r)
            && (0..n).all(|u| (u + 1..n).all(|v| reach[u][v] || reach[v][u]))
    }

    pub fn require_initial_condition(&self) -> Result<(), KripkeError> {
        if self.check_initial_condition() {
            Ok(())
        } else {
            Err(KripkeError::InitialCondition(self.names[self.initial].clone()))
        }
    }

    /// Same states, transitions and initial state; `atoms` removed from every
    /// label and from the alphabet.
    pub fn remove_atoms(&self, atoms: &AtomSet) -> KripkeStructure {
        KripkeStructure {
            names: self.names.clone(),
            succ: self.succ.clone(),
            labels: self.labels.iter().map(|l| l.difference(atoms)).collect(),
            initial: self.initial,
            alphabet: self.alphabet.difference(atoms),
        }
    }

    /// Canonical text in the model file format.
    pub fn to_model_text(&self) -> String {
        let mut out = String::new();
        let atoms: Vec<&str> = self.alphabet.iter().map(Atom::name).collect();
        out.push_str(&format!("atoms: {}\n", atoms.join(" ")).replace(" \n", "\n"));
        out.push_str(&format!("states: {}\n", self.names.join(" ")));
        out.push_str(&format!("init: {}\n", self.names[self.initial]));
        for (s, label) in self.labels.iter().enumerate() {
            if !label.is_empty() {
                let atoms: Vec<&str> = label.iter().map(Atom::name).collect();
                out.push_str(&format!("label {}: {}\n", self.names[s], atoms.join(" ")));
            }
        }
        for (s, t) in self.transitions() {
            out.push_str(&format!("trans: {} -> {}\n", self.names[s], self.names[t]));
        }
        out
    }
}

impl fmt::Debug for KripkeStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_model_text())
    }
}

/// A structure together with a focus state.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointedStructure {
    pub structure: Arc<KripkeStructure>,
    pub focus: usize,
}

impl PointedStructure {
    pub fn new(structure: Arc<KripkeStructure>, focus: usize) -> PointedStructure {
        assert!(focus < structure.num_states(), "focus state out of range");
        PointedStructure { structure, focus }
    }

    /// The structure pointed at its initial state.
    pub fn initial(structure: KripkeStructure) -> PointedStructure {
        let focus = structure.initial();
        PointedStructure {
            structure: Arc::new(structure),
            focus,
        }
    }

    pub fn is_initial(&self) -> bool {
        self.focus == self.structure.initial()
    }

    /// Errors unless this is an initial K-structure over a structure that
    /// satisfies the initial-state condition.
    pub fn require_initial(&self) -> Result<(), KripkeError> {
        if !self.is_initial() {
            return Err(KripkeError::NotInitial(
                self.structure.name(self.focus).to_string(),
            ));
        }
        self.structure.require_initial_condition()
    }
}

impl fmt::Debug for PointedStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}\n{:?}", self.structure.name(self.focus), self.structure)
    }
}

fn format_err(line: usize, message: impl Into<String>) -> KripkeError {
    KripkeError::Format {
        line,
        message: message.into(),
    }
}

/// Parses the model file format without enforcing the initial-state
/// condition. Totality and declarations are still checked.
pub fn parse_model_unchecked(text: &str) -> Result<KripkeStructure, KripkeError> {
    let mut atoms: Option<AtomSet> = None;
    let mut states: Option<Vec<String>> = None;
    let mut init: Option<(usize, String)> = None;
    let mut labels: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut trans: Vec<(usize, String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| format_err(line_no, "expected `<section>: ...`"))?;
        let head = head.trim();
        let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        match head {
            "atoms" => {
                if atoms.is_some() {
                    return Err(format_err(line_no, "duplicate `atoms` line"));
                }
                let set = words
                    .iter()
                    .map(|w| Atom::new(w))
                    .collect::<Result<AtomSet, _>>()
                    .map_err(|e| format_err(line_no, e.to_string()))?;
                atoms = Some(set);
            }
            "states" => {
                if states.is_some() {
                    return Err(format_err(line_no, "duplicate `states` line"));
                }
                if words.is_empty() {
                    return Err(format_err(line_no, "no states declared"));
                }
                states = Some(words);
            }
            "init" => {
                if init.is_some() {
                    return Err(format_err(line_no, "duplicate `init` line"));
                }
                match words.as_slice() {
                    [s] => init = Some((line_no, s.clone())),
                    _ => return Err(format_err(line_no, "`init` takes exactly one state")),
                }
            }
            "trans" => {
                let arrow = rest
                    .split_once("->")
                    .ok_or_else(|| format_err(line_no, "expected `trans: <state> -> <state>`"))?;
                let from = arrow.0.trim();
                let to = arrow.1.trim();
                if from.is_empty()
                    || to.is_empty()
                    || from.contains(char::is_whitespace)
                    || to.contains(char::is_whitespace)
                {
                    return Err(format_err(line_no, "expected `trans: <state> -> <state>`"));
                }
                trans.push((line_no, from.to_string(), to.to_string()));
            }
            _ => {
                let mut parts = head.split_whitespace();
                match (parts.next(), parts.next(), parts.next()) {
                    (Some("label"), Some(state), None) => {
                        labels.push((line_no, state.to_string(), words));
                    }
                    _ => return Err(format_err(line_no, format!("unknown section `{head}`"))),
                }
            }
        }
    }

    let atoms = atoms.ok_or_else(|| format_err(0, "missing `atoms` line"))?;
    let names = states.ok_or_else(|| format_err(0, "missing `states` line"))?;
    let (init_line, init_name) = init.ok_or_else(|| format_err(0, "missing `init` line"))?;
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    if index.len() != names.len() {
        let dup = names
            .iter()
            .enumerate()
            .find(|(i, n)| index[n.as_str()] != *i)
            .map(|(_, n)| n.clone())
            .unwrap_or_default();
        return Err(KripkeError::DuplicateState(dup));
    }
    let lookup = |line: usize, name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| format_err(line, format!("undeclared state `{name}`")))
    };
    let initial = lookup(init_line, &init_name)?;
    let mut label_map: BTreeMap<usize, AtomSet> = BTreeMap::new();
    for (line, state, words) in labels {
        let s = lookup(line, &state)?;
        if label_map.contains_key(&s) {
            return Err(format_err(line, format!("duplicate label for `{state}`")));
        }
        let mut set = AtomSet::new();
        for w in words {
            let atom = Atom::new(&w).map_err(|e| format_err(line, e.to_string()))?;
            if !atoms.contains(&atom) {
                return Err(format_err(line, format!("undeclared atom `{w}`")));
            }
            set.insert(atom);
        }
        label_map.insert(s, set);
    }
    let mut edges = Vec::with_capacity(trans.len());
    for (line, from, to) in &trans {
        edges.push((lookup(*line, from)?, lookup(*line, to)?));
    }
    let labels = (0..names.len())
        .map(|s| label_map.remove(&s).unwrap_or_default())
        .collect();
    KripkeStructure::new(names, &edges, labels, initial, atoms)
}

/// Parses the model file format and enforces every structure invariant,
/// including the initial-state condition.
pub fn parse_model(text: &str) -> Result<KripkeStructure, KripkeError> {
    let m = parse_model_unchecked(text)?;
    m.require_initial_condition()?;
    Ok(m)
}

/// The four-state structure of the car-manufacturing example, with the
/// sports-car atom already removed.
pub const K2_FIXTURE: &str = "\
atoms: d s se
states: s0 s1 s2 s3
init: s0
label s0: d
label s1: s
label s2: se
label s3: se
trans: s0 -> s1
trans: s1 -> s2
trans: s1 -> s3
trans: s2 -> s0
trans: s3 -> s0
";

pub fn k2_fixture() -> KripkeStructure {
    parse_model(K2_FIXTURE).expect("fixture is well formed")
}
