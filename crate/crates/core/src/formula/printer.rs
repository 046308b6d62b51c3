use std::fmt;

use super::{Formula, Kind};

// Binding strength, weakest first. `E[..]`/`A[..]` sit between `->` and `|`.
const IFF: u8 = 0;
const IMPLIES: u8 = 1;
const UNTIL: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

fn level(f: &Formula) -> u8 {
    match f.kind() {
        Kind::Bottom | Kind::Top | Kind::Atom(_) => ATOM,
        Kind::Not(_)
        | Kind::EX(_)
        | Kind::AX(_)
        | Kind::EF(_)
        | Kind::AF(_)
        | Kind::EG(_)
        | Kind::AG(_) => UNARY,
        Kind::And(..) => AND,
        Kind::Or(..) => OR,
        Kind::EU(..) | Kind::AU(..) => UNTIL,
        Kind::Implies(..) => IMPLIES,
        Kind::Iff(..) => IFF,
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_node(out, f)?;
        out.write_str(")")
    } else {
        write_node(out, f)
    }
}

fn write_node(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    let unary = |out: &mut fmt::Formatter<'_>, op: &str, a: &Formula| {
        out.write_str(op)?;
        out.write_str(" ")?;
        write_at(out, a, UNARY)
    };
    match f.kind() {
        Kind::Bottom => out.write_str("false"),
        Kind::Top => out.write_str("true"),
        Kind::Atom(a) => write!(out, "{a}"),
        Kind::Not(a) => {
            out.write_str("!")?;
            write_at(out, a, UNARY)
        }
        Kind::EX(a) => unary(out, "EX", a),
        Kind::AX(a) => unary(out, "AX", a),
        Kind::EF(a) => unary(out, "EF", a),
        Kind::AF(a) => unary(out, "AF", a),
        Kind::EG(a) => unary(out, "EG", a),
        Kind::AG(a) => unary(out, "AG", a),
        Kind::And(a, b) => {
            write_at(out, a, AND)?;
            out.write_str(" & ")?;
            write_at(out, b, UNARY)
        }
        Kind::Or(a, b) => {
            write_at(out, a, OR)?;
            out.write_str(" | ")?;
            write_at(out, b, AND)
        }
        Kind::Implies(a, b) => {
            write_at(out, a, UNTIL)?;
            out.write_str(" -> ")?;
            write_at(out, b, IMPLIES)
        }
        Kind::Iff(a, b) => {
            write_at(out, a, IMPLIES)?;
            out.write_str(" <-> ")?;
            write_at(out, b, IFF)
        }
        Kind::EU(a, b) | Kind::AU(a, b) => {
            let q = if matches!(f.kind(), Kind::EU(..)) { "E" } else { "A" };
            write!(out, "{q}[")?;
            write_at(out, a, IFF)?;
            out.write_str(" U ")?;
            write_at(out, b, IFF)?;
            out.write_str("]")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self)
    }
}
