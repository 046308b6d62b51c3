//! Recursive-descent parser for the formula text grammar.
//!
//! Binding strength from weakest to strongest: `<->`, `->` (both right
//! associative), `E[_ U _]`/`A[_ U _]`, `|`, `&` (left associative), then the
//! prefix operators `! EX AX EF AF EG AG`. The bracketed until forms are
//! self-delimiting, so they are also accepted wherever an atom may appear.

use super::{Atom, AtomSet, Formula, FormulaError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Unary(&'static str),
    EBracket,
    ABracket,
    Until,
    RBracket,
    LParen,
    RParen,
    Ident(String),
    End,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(name) => format!("identifier `{name}`"),
        Tok::End => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| FormulaError::Syntax { pos, message };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'!' => {
                i += 1;
                Tok::Not
            }
            b'&' => {
                i += 1;
                Tok::And
            }
            b'|' => {
                i += 1;
                Tok::Or
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b']' => {
                i += 1;
                Tok::RBracket
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 3;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "U" => Tok::Until,
                    "EX" => Tok::Unary("EX"),
                    "AX" => Tok::Unary("AX"),
                    "EF" => Tok::Unary("EF"),
                    "AF" => Tok::Unary("AF"),
                    "EG" => Tok::Unary("EG"),
                    "AG" => Tok::Unary("AG"),
                    "E" | "A" => {
                        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                            i += 1;
                        }
                        if bytes.get(i) != Some(&b'[') {
                            return Err(err(start, format!("expected `[` after `{word}`")));
                        }
                        i += 1;
                        if word == "E" {
                            Tok::EBracket
                        } else {
                            Tok::ABracket
                        }
                    }
                    _ => Tok::Ident(word.to_string()),
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(err(i, format!("unexpected character `{ch}`")));
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    alphabet: Option<&'a AtomSet>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].0.clone();
        if tok != Tok::End {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(FormulaError::Syntax {
                pos: self.offset(),
                message: format!("expected {what}, found {}", describe(self.peek())),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.implies()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Unary(op) => {
                self.bump();
                let inner = self.unary()?;
                Ok(match op {
                    "EX" => Formula::ex(inner),
                    "AX" => Formula::ax(inner),
                    "EF" => Formula::ef(inner),
                    "AF" => Formula::af(inner),
                    "EG" => Formula::eg(inner),
                    _ => Formula::ag(inner),
                })
            }
            _ => self.atomlike(),
        }
    }

    fn atomlike(&mut self) -> Result<Formula, FormulaError> {
        let at = self.offset();
        match self.bump() {
            Tok::True => Ok(Formula::top()),
            Tok::False => Ok(Formula::bottom()),
            Tok::LParen => {
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            tok @ (Tok::EBracket | Tok::ABracket) => {
                let lhs = self.formula()?;
                self.expect(Tok::Until, "`U`")?;
                let rhs = self.formula()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(if tok == Tok::EBracket {
                    Formula::eu(lhs, rhs)
                } else {
                    Formula::au(lhs, rhs)
                })
            }
            Tok::Ident(name) => {
                let atom = Atom::new(&name)?;
                if let Some(alphabet) = self.alphabet {
                    if !alphabet.contains(&atom) {
                        return Err(FormulaError::UnknownAtom(name));
                    }
                }
                Ok(Formula::atom(atom))
            }
            other => Err(FormulaError::Syntax {
                pos: at,
                message: format!("expected a formula, found {}", describe(&other)),
            }),
        }
    }
}

fn run(text: &str, alphabet: Option<&AtomSet>) -> Result<Formula, FormulaError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        alphabet,
    };
    let f = parser.formula()?;
    if *parser.peek() != Tok::End {
        return Err(FormulaError::Syntax {
            pos: parser.offset(),
            message: format!("unexpected {}", describe(parser.peek())),
        });
    }
    Ok(f)
}

/// Parses `text`, rejecting atoms outside `alphabet`.
pub fn parse(text: &str, alphabet: &AtomSet) -> Result<Formula, FormulaError> {
    run(text, Some(alphabet))
}

/// Parses `text` accepting any well-formed atom name.
pub fn parse_any(text: &str) -> Result<Formula, FormulaError> {
    run(text, None)
}
