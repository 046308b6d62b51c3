//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. The process fails when a criterion's
//! outcome differs from what `KNOWN_FAILURES` records, so a fixed failure
//! and a new one are both noticed.

use std::time::Instant;

use ctl_forget::bisim::{characterization_number, v_bisimilar};
use ctl_forget::charform::{structure_formula, tree_formula};
use ctl_forget::conditions::{wsc_under_structure, Target};
use ctl_forget::forgetting::{forget, forget_prop, is_model_of_forget, verify_postulates};
use ctl_forget::formula::{parse_any, AtomSet, Formula};
use ctl_forget::kripke::{k2_fixture, PointedStructure};
use ctl_forget::modelcheck::check;
use ctl_forget::modelspace::{
    entails, enumerate_initial, equivalent, models_of, SpaceError, Universe, UniverseConfig, DEFAULT_MAX_STATES,
};
use ctl_forget::sample::{random_probes, FormulaSampler};

/// Criteria expected to fail, with the reason printed next to them.
const KNOWN_FAILURES: &[(u32, &str)] = &[
    (
        5,
        "K2 satisfies the target, so the WSC is true; it agrees with EX(s & EX !d) only on models of K2's characterizing formula",
    ),
    (
        10,
        "an outer bound of max_states + 1 can miss the witness for an AX instance; it appears with one more state",
    ),
];

type Outcome = Result<String, String>;

fn atoms(names: &[&str]) -> AtomSet {
    AtomSet::from_names(names).unwrap()
}

fn f(text: &str) -> Formula {
    parse_any(text).unwrap()
}

fn k2() -> PointedStructure {
    PointedStructure::initial(k2_fixture())
}

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn equiv(a: &Formula, b: &Formula, c: &UniverseConfig) -> Result<bool, String> {
    equivalent(a, b, c).map_err(|e| e.to_string())
}

fn forgotten(phi: &Formula, v: &AtomSet, c: &UniverseConfig) -> Result<Formula, String> {
    forget(phi, v, c).map(|r| r.formula).map_err(|e| e.to_string())
}

fn tree_identities() -> Outcome {
    let m = k2_fixture();
    let d = atoms(&["d"]);
    let depth = characterization_number(&m, &d);
    ensure(depth == 1, || format!("characterization number {depth}"))?;
    let c = UniverseConfig::new(d.clone(), 3);
    let expected = [
        ("s0", 0, "d"),
        ("s1", 0, "!d"),
        ("s2", 0, "!d"),
        ("s3", 0, "!d"),
        ("s0", 1, "AX !d & d"),
        ("s1", 1, "AX !d & !d"),
        ("s2", 1, "AX d & !d"),
        ("s3", 1, "AX d & !d"),
    ];
    for (state, n, text) in expected {
        let s = m.state_index(state).unwrap();
        let t = tree_formula(&m, s, n, &d).map_err(|e| e.to_string())?;
        ensure(equiv(&t, &f(text), &c)?, || format!("{state} depth {n}: got {t}"))?;
    }
    Ok("chardepth 1, eight tree identities".into())
}

fn structure_identity() -> Outcome {
    let d = atoms(&["d"]);
    let c = UniverseConfig::new(d.clone(), 3);
    let got = structure_formula(&k2(), &d).map_err(|e| e.to_string())?;
    let expected = f("AX !d & d \
        & AG (AX !d & d -> AX (AX !d & !d)) \
        & AG (AX !d & !d -> AX (AX d & !d)) \
        & AG (AX d & !d -> AX (AX !d & d))");
    ensure(equiv(&got, &expected, &c)?, || format!("got {got}"))?;
    Ok("equivalent to the four-conjunct AG formula".into())
}

fn forget_example() -> Outcome {
    let c = UniverseConfig::new(atoms(&["se", "sp"]), 3);
    let r = forget(&f("EF (se & sp)"), &atoms(&["sp"]), &c).map_err(|e| e.to_string())?;
    ensure(equiv(&r.formula, &f("EF se"), &c)?, || "not equivalent to EF se".into())?;
    Ok(format!("{} classes, equivalent to EF se", r.class_representatives.len()))
}

fn check_example() -> Outcome {
    let k = k2();
    let one = check(&k, &f("d & EF se & AG (se -> AX d)")).map_err(|e| e.to_string())?;
    let two = check(&k, &f("d & AX se")).map_err(|e| e.to_string())?;
    ensure(one && !two, || format!("phi1 {one}, phi2 {two}"))?;
    Ok("phi1 true, phi2 false".into())
}

fn wsc_example() -> Outcome {
    let all = atoms(&["d", "s", "se"]);
    let c = UniverseConfig::new(all.clone(), 4);
    let target = Target::Formula(f("EX (s & (EX se | EX !d))"));
    let wsc = wsc_under_structure(&k2(), &target, &atoms(&["s", "d"]), &c).map_err(|e| e.to_string())?;
    let expected = f("EX (s & EX !d)");
    let background = structure_formula(&k2(), &all).map_err(|e| e.to_string())?;
    let relative = entails(&background, &Formula::iff(wsc.clone(), expected.clone()), &c).map_err(|e| e.to_string())?;
    let plain = equiv(&wsc, &expected, &c)?;
    let detail = format!("wsc = {wsc}; equivalent: {plain}; equivalent on models of F(K2): {relative}");
    if plain {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn postulate_suite() -> Outcome {
    let pq = atoms(&["p", "q"]);
    let mut sampler = FormulaSampler::new(&pq, 6);
    let mut probes_checked = 0;
    for i in 0..50u64 {
        let c = UniverseConfig::new(pq.clone(), if i % 5 == 0 { 3 } else { 2 });
        let phi = sampler.formula(3);
        let v = sampler.subset(&pq);
        let probes = random_probes(&pq.difference(&v), 12, 3, 100 + i);
        let report = verify_postulates(&phi, &v, &c, &probes).map_err(|e| e.to_string())?;
        probes_checked += report.probes.len();
        ensure(report.all_hold(), || format!("{phi} minus {v}: {report:?}"))?;
    }
    Ok(format!("50 pairs, {probes_checked} probes outside V"))
}

fn propositional_agreement() -> Outcome {
    let pqr = atoms(&["p", "q", "r"]);
    let c = UniverseConfig::new(pqr.clone(), 2);
    let mut sampler = FormulaSampler::new(&pqr, 7).propositional();
    let mut checks = 0;
    for _ in 0..100 {
        let phi = sampler.formula(4);
        for v in phi.vars().subsets() {
            let ours = forgotten(&phi, &v, &c)?;
            let theirs = forget_prop(&phi, &v).map_err(|e| e.to_string())?;
            ensure(equiv(&ours, &theirs, &c)?, || format!("{phi} minus {v}"))?;
            checks += 1;
        }
    }
    Ok(format!("100 formulas, {checks} (phi, V) checks"))
}

fn characterization_biconditional() -> Outcome {
    let p = atoms(&["p"]);
    let c = UniverseConfig::new(p.clone(), 2);
    let all: Vec<PointedStructure> = enumerate_initial(&c).map_err(|e| e.to_string())?.collect();
    let mut checks = 0;
    for v in p.subsets() {
        let ignored = p.difference(&v);
        for k in &all {
            let sf = structure_formula(k, &v).map_err(|e| e.to_string())?;
            for other in &all {
                let sat = check(other, &sf).map_err(|e| e.to_string())?;
                let bis = v_bisimilar(k, other, &ignored);
                ensure(sat == bis, || format!("{k:?} vs {other:?} on {v}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("{} structures, {checks} checks", all.len()))
}

fn models_disjunction() -> Outcome {
    let p = atoms(&["p"]);
    let c = UniverseConfig::new(p.clone(), 2);
    let u = Universe::new(&c).map_err(|e| e.to_string())?;
    let mut sampler = FormulaSampler::new(&p, 9);
    let mut done = 0;
    while done < 20 {
        let phi = sampler.formula(3);
        if !u.satisfiable(&phi).map_err(|e| e.to_string())? {
            continue;
        }
        let ks = models_of(&phi, &c).map_err(|e| e.to_string())?;
        let parts = ks
            .iter()
            .map(|k| structure_formula(k, &p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        ensure(equiv(&phi, &Formula::disj(parts), &c)?, || format!("{phi}"))?;
        done += 1;
    }
    Ok("20 satisfiable formulas".into())
}

fn algebraic_laws() -> Outcome {
    let pq = atoms(&["p", "q"]);
    let (inner, outer) = (UniverseConfig::new(pq.clone(), 2), UniverseConfig::new(pq.clone(), 3));
    let wider = UniverseConfig::new(pq.clone(), 4);
    let mut sampler = FormulaSampler::new(&pq, 0);
    let (p, q) = (atoms(&["p"]), atoms(&["q"]));
    let c = &inner;
    let mut failures = Vec::new();
    for i in 0..20 {
        let phi = sampler.formula(3);
        let psi = sampler.formula(3);
        let v = sampler.subset(&pq);
        let fv = forgotten(&phi, &v, c)?;
        let whole = forgotten(&phi, &pq, c)?;
        if !equiv(&whole, &forgotten(&forgotten(&phi, &p, c)?, &q, c)?, c)? {
            failures.push(format!("modularity #{i}"));
        }
        let pq_order = forgotten(&forgotten(&phi, &p, c)?, &q, c)?;
        let qp_order = forgotten(&forgotten(&phi, &q, c)?, &p, c)?;
        if !equiv(&pq_order, &qp_order, c)? {
            failures.push(format!("commutativity #{i}"));
        }
        let fpsi = forgotten(&psi, &v, c)?;
        let or = forgotten(&Formula::or(phi.clone(), psi.clone()), &v, c)?;
        if !equiv(&or, &Formula::or(fv.clone(), fpsi.clone()), c)? {
            failures.push(format!("disjunction #{i}"));
        }
        let and = forgotten(&Formula::and(phi.clone(), psi.clone()), &v, c)?;
        if !entails(&and, &Formula::and(fv.clone(), fpsi), c).map_err(|e| e.to_string())? {
            failures.push(format!("conjunction #{i}"));
        }
        let ops: [(&str, fn(Formula) -> Formula); 4] =
            [("AX", Formula::ax), ("EX", Formula::ex), ("AF", Formula::af), ("EF", Formula::ef)];
        for (name, op) in ops {
            let lhs = forgotten(&op(phi.clone()), &v, &outer)?;
            if !equiv(&lhs, &op(fv.clone()), c)? {
                // Retry with one more state in the outer universe to tell a
                // bound effect from a real disagreement.
                let lhs = forgotten(&op(phi.clone()), &v, &wider)?;
                let retry = equiv(&lhs, &op(fv.clone()), c)?;
                failures.push(format!("{name} homogeneity #{i}: {phi} minus {v} (outer bound 4: holds {retry})"));
            }
        }
    }
    if failures.is_empty() {
        Ok("20 instances each of eight laws".into())
    } else {
        Err(failures.join("; "))
    }
}

fn model_set_condition() -> Outcome {
    let pq = atoms(&["p", "q"]);
    let c = UniverseConfig::new(pq.clone(), 2);
    let all: Vec<PointedStructure> = enumerate_initial(&c).map_err(|e| e.to_string())?.collect();
    let pairs = [
        ("EF (p & q)", "q"),
        ("AX p | q", "p"),
        ("A[p U q]", "q"),
        ("E[p U q] & AG !q", "q"),
        ("p <-> AX q", "q"),
        ("EG p & EF !q", "p"),
        ("AG (p -> EX q)", "p"),
        ("AF q & !p", "p"),
        ("EX EX (p & !q)", "p,q"),
        ("q & AG (q -> AX !q) & AG (!q -> AX q)", "q"),
    ];
    for (text, drop) in pairs {
        let phi = f(text);
        let v = AtomSet::parse_list(drop).unwrap();
        let result = forgotten(&phi, &v, &c)?;
        for k in &all {
            let direct = is_model_of_forget(k, &phi, &v, &c).map_err(|e| e.to_string())?;
            let via = check(k, &result).map_err(|e| e.to_string())?;
            ensure(direct == via, || format!("{text} minus {drop} at {k:?}"))?;
        }
    }
    Ok(format!("{} pairs over {} structures", pairs.len(), all.len()))
}

fn bound_is_enforced() -> Outcome {
    ensure(DEFAULT_MAX_STATES == 3, || format!("default {DEFAULT_MAX_STATES}"))?;
    let big = UniverseConfig::new(atoms(&["p", "q"]), 6);
    ensure(matches!(Universe::new(&big), Err(SpaceError::CapExceeded { .. })), || {
        "six states over two atoms was not refused".into()
    })?;
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap_or_default();
    ensure(readme.contains("## Complexity"), || "README lacks a complexity section".into())?;
    Ok("default 3, cap refuses large bounds, README documents the cost".into())
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "tree formulas of the K2 fixture", tree_identities),
        (2, "structure formula of the K2 fixture", structure_identity),
        (3, "forget EF(se & sp) on sp", forget_example),
        (4, "model checking the K2 fixture", check_example),
        (5, "WSC under the K2 fixture", wsc_example),
        (6, "postulates W, PP, NP, IR", postulate_suite),
        (7, "agreement with propositional forgetting", propositional_agreement),
        (8, "characterizing formula biconditional", characterization_biconditional),
        (9, "formula as disjunction over its models", models_disjunction),
        (10, "algebraic laws", algebraic_laws),
        (11, "model-set condition of forgetting", model_set_condition),
        (12, "enumeration bound", bound_is_enforced),
    ];
    let mut surprises = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        match (&outcome, known) {
            (Ok(detail), _) => println!("PASS {id:>2} {name} ({secs:.1}s): {detail}"),
            (Err(detail), Some((_, why))) => {
                println!("FAIL {id:>2} {name} ({secs:.1}s): {detail} [known: {why}]")
            }
            (Err(detail), None) => println!("FAIL {id:>2} {name} ({secs:.1}s): {detail}"),
        }
        if outcome.is_ok() == known.is_some() {
            surprises += 1;
        }
    }
    if surprises > 0 {
        eprintln!("{surprises} criteria differ from the recorded expectations");
        std::process::exit(1);
    }
}
