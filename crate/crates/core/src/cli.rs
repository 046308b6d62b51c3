//! Command-line front end. [`run`] returns the output text and exit code so
//! that tests can drive it without a process.

use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bisim::{bisim_family, characterization_number};
use crate::charform::{structure_formula, tree_formula};
use crate::conditions::{condition_under_structure, snc_atom, snc_formula, wsc_atom, wsc_formula, Condition, Target};
use crate::forgetting::{forget, verify_postulates};
use crate::formula::{parse, parse_any, Atom, AtomSet, Formula};
use crate::kripke::{parse_model, parse_model_unchecked, KripkeStructure, PointedStructure};
use crate::modelcheck::check;
use crate::modelspace::{entails, models_of, UniverseConfig, DEFAULT_MAX_STATES};
use crate::sample::random_probes;

#[derive(Parser, Debug)]
#[command(name = "ctlforget", version, about = "Forgetting, characterizing formulas and SNC/WSC for CTL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print intermediate structures.
    #[arg(long, global = true)]
    verbose: bool,
    /// Worker threads for enumeration (output does not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Bound {
    /// Comma-separated alphabet; defaults to the atoms of the inputs.
    #[arg(long)]
    atoms: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    /// Collapse plain-bisimilar structures when listing.
    #[arg(long)]
    dedupe: bool,
    /// Lift the enumeration cap.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model-check a formula at a structure's initial state.
    Check {
        #[arg(long)]
        model: String,
        #[arg(long)]
        formula: String,
    },
    /// Bisimilarity of two structures ignoring some atoms.
    Bisim {
        #[arg(long)]
        model: String,
        #[arg(long)]
        other: String,
        /// Atoms to ignore.
        #[arg(long, default_value = "")]
        drop: String,
    },
    /// Characterization number of a structure on a set of atoms.
    Chardepth {
        #[arg(long)]
        model: String,
        #[arg(long)]
        on: String,
    },
    /// Characterizing formula of a structure, or of one computation tree.
    Charform {
        #[arg(long)]
        model: String,
        #[arg(long)]
        on: String,
        /// Tree formula of this state instead of the structure formula.
        #[arg(long, requires = "depth")]
        state: Option<String>,
        #[arg(long, requires = "state")]
        depth: Option<usize>,
    },
    /// Forget atoms from a formula.
    Forget {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        drop: String,
        #[command(flatten)]
        bound: Bound,
    },
    /// Strongest necessary condition.
    Snc(ConditionArgs),
    /// Weakest sufficient condition.
    Wsc(ConditionArgs),
    /// Bounded models of a formula.
    Models {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        bound: Bound,
    },
    /// Bounded equivalence of two formulas.
    Equiv {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        other: String,
        #[command(flatten)]
        bound: Bound,
    },
    /// Check weakening, persistence and irrelevance on random probes.
    Postulates {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        drop: String,
        #[arg(long, default_value_t = 10)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        bound: Bound,
    },
}

#[derive(Args, Debug)]
struct ConditionArgs {
    /// Atom or formula.
    #[arg(long)]
    target: String,
    /// Atoms the condition may mention.
    #[arg(long)]
    on: String,
    #[arg(long, conflicts_with = "under_model", required_unless_present = "under_model")]
    under_formula: Option<String>,
    #[arg(long)]
    under_model: Option<String>,
    #[command(flatten)]
    bound: Bound,
}

/// A finished command: the answer plus extra fields.
struct Outcome {
    answer: Value,
    text: String,
    fields: Map<String, Value>,
    config: Option<UniverseConfig>,
}

impl Outcome {
    fn new(answer: Value, text: impl Into<String>) -> Outcome {
        Outcome {
            answer,
            text: text.into(),
            fields: Map::new(),
            config: None,
        }
    }

    fn bounded(mut self, config: &UniverseConfig) -> Outcome {
        self.config = Some(config.clone());
        self
    }

    fn field(mut self, key: &str, value: Value) -> Outcome {
        self.fields.insert(key.to_string(), value);
        self
    }
}

fn read_model(path: &str, strict: bool) -> Result<KripkeStructure, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let parsed = if strict {
        parse_model(&text)
    } else {
        parse_model_unchecked(&text)
    };
    parsed.map_err(|e| format!("{path}: {e}"))
}

fn atoms(list: &str) -> Result<AtomSet, String> {
    AtomSet::parse_list(list).map_err(|e| e.to_string())
}

fn formula(text: &str) -> Result<Formula, String> {
    parse_any(text).map_err(|e| e.to_string())
}

fn config(bound: &Bound, inputs: &[&AtomSet]) -> Result<UniverseConfig, String> {
    let alphabet = match &bound.atoms {
        Some(list) => atoms(list)?,
        None => inputs.iter().fold(AtomSet::new(), |acc, s| acc.union(s)),
    };
    let mut c = UniverseConfig::new(alphabet, bound.max_states).with_dedupe(bound.dedupe);
    c.allow_large = bound.allow_large;
    Ok(c)
}

fn atom_list(set: &AtomSet) -> Value {
    Value::Array(set.iter().map(|a| Value::String(a.to_string())).collect())
}

fn execute(command: &Command, verbose: bool) -> Result<Outcome, String> {
    match command {
        Command::Check { model, formula: text } => {
            let m = read_model(model, false)?;
            let phi = parse(text, m.alphabet()).map_err(|e| e.to_string())?;
            let init = m.initial();
            let k = PointedStructure::new(Arc::new(m), init);
            let answer = check(&k, &phi).map_err(|e| e.to_string())?;
            Ok(Outcome::new(json!(answer), answer.to_string()))
        }
        Command::Bisim { model, other, drop } => {
            let left = read_model(model, false)?;
            let right = read_model(other, false)?;
            let ignored = atoms(drop)?;
            let family = bisim_family(&left, &right, &ignored);
            let answer = family.related(left.initial(), right.initial());
            Ok(Outcome::new(json!(answer), answer.to_string())
                .field("fixpoint_index", json!(family.fixpoint_index()))
                .field("ignored", atom_list(&ignored)))
        }
        Command::Chardepth { model, on } => {
            let m = read_model(model, false)?;
            let kept = atoms(on)?;
            let n = characterization_number(&m, &kept);
            Ok(Outcome::new(json!(n), n.to_string()))
        }
        Command::Charform { model, on, state, depth } => {
            let kept = atoms(on)?;
            let f = match (state, depth) {
                (Some(name), Some(d)) => {
                    let m = read_model(model, false)?;
                    let s = m
                        .state_index(name)
                        .ok_or_else(|| format!("unknown state `{name}`"))?;
                    tree_formula(&m, s, *d, &kept).map_err(|e| e.to_string())?
                }
                _ => {
                    let m = read_model(model, true)?;
                    structure_formula(&PointedStructure::initial(m), &kept).map_err(|e| e.to_string())?
                }
            };
            Ok(Outcome::new(json!(f.to_string()), f.to_string()))
        }
        Command::Forget { formula: text, drop, bound } => {
            let phi = formula(text)?;
            let v = atoms(drop)?;
            let c = config(bound, &[&phi.vars(), &v])?;
            let result = forget(&phi, &v, &c).map_err(|e| e.to_string())?;
            let f = result.formula.to_string();
            let mut text = f.clone();
            let reps: Vec<String> = result
                .class_representatives
                .iter()
                .map(|k| k.structure.to_model_text())
                .collect();
            if verbose {
                for (i, r) in reps.iter().enumerate() {
                    let _ = write!(text, "\n# class {}\n{}", i + 1, r.trim_end());
                }
            }
            let mut out = Outcome::new(json!(f), text)
                .field("classes", json!(reps.len()))
                .bounded(&c);
            if verbose {
                out = out.field("class_representatives", json!(reps));
            }
            Ok(out)
        }
        Command::Snc(args) => condition(Condition::Snc, args),
        Command::Wsc(args) => condition(Condition::Wsc, args),
        Command::Models { formula: text, bound } => {
            let phi = formula(text)?;
            let c = config(bound, &[&phi.vars()])?;
            let models = models_of(&phi, &c).map_err(|e| e.to_string())?;
            let mut text = models.len().to_string();
            let listed: Vec<String> = models.iter().map(|k| k.structure.to_model_text()).collect();
            if verbose {
                for (i, m) in listed.iter().enumerate() {
                    let _ = write!(text, "\n# model {}\n{}", i + 1, m.trim_end());
                }
            }
            let mut out = Outcome::new(json!(models.len()), text).bounded(&c);
            if verbose {
                out = out.field("models", json!(listed));
            }
            Ok(out)
        }
        Command::Equiv { formula: a, other: b, bound } => {
            let phi = formula(a)?;
            let psi = formula(b)?;
            let c = config(bound, &[&phi.vars(), &psi.vars()])?;
            let forth = entails(&phi, &psi, &c).map_err(|e| e.to_string())?;
            let back = entails(&psi, &phi, &c).map_err(|e| e.to_string())?;
            Ok(Outcome::new(json!(forth && back), (forth && back).to_string())
                .field("left_entails_right", json!(forth))
                .field("right_entails_left", json!(back))
                .bounded(&c))
        }
        Command::Postulates { formula: text, drop, probes, seed, bound } => {
            let phi = formula(text)?;
            let v = atoms(drop)?;
            let c = config(bound, &[&phi.vars(), &v])?;
            let outside = c.alphabet.difference(&v);
            let probes = random_probes(&outside, *probes, 3, *seed);
            let report = verify_postulates(&phi, &v, &c, &probes).map_err(|e| e.to_string())?;
            let verdicts = [
                ("weakening", report.weakening),
                ("positive_persistence", report.positive_persistence()),
                ("negative_persistence", report.negative_persistence()),
                ("irrelevance", report.irrelevance),
            ];
            let mut text = report.all_hold().to_string();
            for (name, ok) in verdicts {
                let _ = write!(text, "\n{name}: {ok}");
            }
            let _ = write!(text, "\nprobes: {}", report.probes.len());
            let mut out = Outcome::new(json!(report.all_hold()), text)
                .field("forgotten", json!(report.forgotten.to_string()))
                .field("probes", json!(report.probes.len()))
                .bounded(&c);
            for (name, ok) in verdicts {
                out = out.field(name, json!(ok));
            }
            Ok(out)
        }
    }
}

fn condition(which: Condition, args: &ConditionArgs) -> Result<Outcome, String> {
    let v = atoms(&args.on)?;
    let target = match Atom::new(args.target.trim()) {
        Ok(a) => Target::Atom(a),
        Err(_) => Target::Formula(formula(&args.target)?),
    };
    let target_vars = match &target {
        Target::Atom(a) => [a.clone()].into_iter().collect(),
        Target::Formula(f) => f.vars(),
    };
    let result = if let Some(path) = &args.under_model {
        let m = read_model(path, true)?;
        let c = config(&args.bound, &[m.alphabet()])?;
        let k = PointedStructure::initial(m);
        condition_under_structure(which, &k, &target, &v, &c).map(|f| (f, c))
    } else {
        let gamma = formula(args.under_formula.as_deref().unwrap_or("true"))?;
        let c = config(&args.bound, &[&gamma.vars(), &target_vars, &v])?;
        let f = match (&target, which) {
            (Target::Atom(q), Condition::Snc) => snc_atom(q, &v, &gamma, &c),
            (Target::Atom(q), Condition::Wsc) => wsc_atom(q, &v, &gamma, &c),
            (Target::Formula(a), Condition::Snc) => snc_formula(a, &v, &gamma, &c),
            (Target::Formula(a), Condition::Wsc) => wsc_formula(a, &v, &gamma, &c),
        };
        f.map(|f| (f, c))
    };
    let (f, c) = result.map_err(|e| e.to_string())?;
    Ok(Outcome::new(json!(f.to_string()), f.to_string()).bounded(&c))
}

fn render(name: &str, outcome: Outcome, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = outcome.text;
            if let Some(c) = &outcome.config {
                let _ = write!(
                    out,
                    "\n# relative to bound: max_states={}, alphabet={{{}}}, dedupe={}",
                    c.max_states, c.alphabet, c.dedupe
                );
            }
            out.push('\n');
            out
        }
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("command".into(), json!(name));
            obj.insert("status".into(), json!("ok"));
            obj.insert("answer".into(), outcome.answer);
            if let Some(c) = &outcome.config {
                obj.insert("max_states".into(), json!(c.max_states));
                obj.insert("alphabet".into(), atom_list(&c.alphabet));
                obj.insert("dedupe".into(), json!(c.dedupe));
            }
            obj.extend(outcome.fields);
            format!("{}\n", Value::Object(obj))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Bisim { .. } => "bisim",
        Command::Chardepth { .. } => "chardepth",
        Command::Charform { .. } => "charform",
        Command::Forget { .. } => "forget",
        Command::Snc(_) => "snc",
        Command::Wsc(_) => "wsc",
        Command::Models { .. } => "models",
        Command::Equiv { .. } => "equiv",
        Command::Postulates { .. } => "postulates",
    }
}

/// Runs one command line. Exit codes: 0 ok, 1 domain error, 2 usage error.
pub fn run<I, S>(argv: I) -> (String, i32)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (e.render().to_string(), code);
        }
    };
    if let Some(n) = cli.jobs {
        // Fails harmlessly if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let name = command_name(&cli.command);
    match execute(&cli.command, cli.verbose) {
        Ok(outcome) => (render(name, outcome, cli.format), 0),
        Err(message) => {
            let out = match cli.format {
                Format::Text => format!("error: {message}\n"),
                Format::Json => format!(
                    "{}\n",
                    json!({"command": name, "status": "error", "message": message})
                ),
            };
            (out, 1)
        }
    }
}
