//! Catalog regular expressions over {<,=,>} and their compilation to minimal DFAs.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dfa::{minimize, Dfa};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regex {
    Epsilon,
    Sym(Symbol),
    Concat(Vec<Regex>),
    Union(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegexParseError {
    pub pos: usize,
    pub msg: &'static str,
}

impl fmt::Display for RegexParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "regex parse error at {}: {}", self.pos, self.msg)
    }
}

/// Grammar: union of concatenations of postfix atoms. Atoms are `<`, `=`, `>`, `ε`
/// and parenthesised expressions; postfix operators are `*`, `+`, `?`. Blanks are ignored.
pub fn parse(pattern: &str) -> Result<Regex, RegexParseError> {
    let chars: Vec<char> = pattern.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { chars, pos: 0 };
    let r = p.union()?;
    if p.pos != p.chars.len() {
        return Err(RegexParseError { pos: p.pos, msg: "unexpected character" });
    }
    Ok(r)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn union(&mut self) -> Result<Regex, RegexParseError> {
        let mut alts = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            alts.push(self.concat()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Regex::Union(alts) })
    }

    fn concat(&mut self) -> Result<Regex, RegexParseError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            items.push(self.postfix()?);
        }
        Ok(match items.len() {
            0 => Regex::Epsilon,
            1 => items.pop().unwrap(),
            _ => Regex::Concat(items),
        })
    }

    fn postfix(&mut self) -> Result<Regex, RegexParseError> {
        let mut r = self.atom()?;
        while let Some(c) = self.peek() {
            r = match c {
                '*' => Regex::Star(Box::new(r)),
                '+' => Regex::Plus(Box::new(r)),
                '?' => Regex::Union(vec![r, Regex::Epsilon]),
                _ => break,
            };
            self.pos += 1;
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex, RegexParseError> {
        let c = self.peek().ok_or(RegexParseError { pos: self.pos, msg: "unexpected end" })?;
        self.pos += 1;
        match c {
            '(' => {
                let r = self.union()?;
                if self.peek() != Some(')') {
                    return Err(RegexParseError { pos: self.pos, msg: "expected ')'" });
                }
                self.pos += 1;
                Ok(r)
            }
            'ε' => Ok(Regex::Epsilon),
            _ => Symbol::from_char(c)
                .map(Regex::Sym)
                .ok_or(RegexParseError { pos: self.pos - 1, msg: "unknown symbol" }),
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atomic(r: &Regex) -> bool {
            matches!(r, Regex::Sym(_) | Regex::Epsilon | Regex::Star(_) | Regex::Plus(_))
        }
        match self {
            Regex::Epsilon => write!(f, "ε"),
            Regex::Sym(s) => write!(f, "{}", s.as_char()),
            Regex::Concat(items) => {
                for r in items {
                    if matches!(r, Regex::Union(_)) {
                        write!(f, "({})", r)?;
                    } else {
                        write!(f, "{}", r)?;
                    }
                }
                Ok(())
            }
            Regex::Union(alts) => {
                for (i, r) in alts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{}", r)?;
                }
                Ok(())
            }
            Regex::Star(r) | Regex::Plus(r) => {
                let op = if matches!(self, Regex::Star(_)) { '*' } else { '+' };
                if atomic(r) && !matches!(**r, Regex::Star(_) | Regex::Plus(_)) {
                    write!(f, "{}{}", r, op)
                } else {
                    write!(f, "({}){}", r, op)
                }
            }
        }
    }
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    sym: Vec<Vec<(Symbol, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.sym.push(Vec::new());
        self.eps.len() - 1
    }

    /// Thompson fragment; returns (start, end).
    fn build(&mut self, r: &Regex) -> (usize, usize) {
        match r {
            Regex::Epsilon => {
                let s = self.state();
                let e = self.state();
                self.eps[s].push(e);
                (s, e)
            }
            Regex::Sym(c) => {
                let s = self.state();
                let e = self.state();
                self.sym[s].push((*c, e));
                (s, e)
            }
            Regex::Concat(items) => {
                let s = self.state();
                let mut cur = s;
                for it in items {
                    let (a, b) = self.build(it);
                    self.eps[cur].push(a);
                    cur = b;
                }
                (s, cur)
            }
            Regex::Union(alts) => {
                let s = self.state();
                let e = self.state();
                for it in alts {
                    let (a, b) = self.build(it);
                    self.eps[s].push(a);
                    self.eps[b].push(e);
                }
                (s, e)
            }
            Regex::Star(inner) | Regex::Plus(inner) => {
                let s = self.state();
                let e = self.state();
                let (a, b) = self.build(inner);
                self.eps[s].push(a);
                self.eps[b].push(a);
                self.eps[b].push(e);
                if matches!(r, Regex::Star(_)) {
                    self.eps[s].push(e);
                }
                (s, e)
            }
        }
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }
}

/// Minimal DFA of the language of `r`.
pub fn compile(r: &Regex) -> Dfa {
    let mut nfa = Nfa::default();
    let (start, end) = nfa.build(r);
    let mut init = BTreeSet::from([start]);
    nfa.closure(&mut init);
    let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut sets = vec![init.clone()];
    index.insert(init, 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut row = [None; 3];
        for s in Symbol::ALL {
            let mut next = BTreeSet::new();
            for &q in &sets[i] {
                for &(c, t) in &nfa.sym[q] {
                    if c == s {
                        next.insert(t);
                    }
                }
            }
            if next.is_empty() {
                continue;
            }
            nfa.closure(&mut next);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = sets.len();
                    index.insert(next.clone(), id);
                    sets.push(next);
                    id
                }
            };
            row[s.index()] = Some(id);
        }
        trans.push(row);
        i += 1;
    }
    let accepting = sets.iter().map(|s| s.contains(&end)).collect();
    minimize(&Dfa { trans, initial: 0, accepting })
}

pub fn mirror(r: &Regex) -> Regex {
    match r {
        Regex::Epsilon => Regex::Epsilon,
        Regex::Sym(s) => Regex::Sym(s.mirror()),
        Regex::Concat(v) => Regex::Concat(v.iter().map(mirror).collect()),
        Regex::Union(v) => Regex::Union(v.iter().map(mirror).collect()),
        Regex::Star(b) => Regex::Star(Box::new(mirror(b))),
        Regex::Plus(b) => Regex::Plus(Box::new(mirror(b))),
    }
}

pub fn to_pattern_string(r: &Regex) -> String {
    use alloc::string::ToString;
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Signature;

    fn accepts(p: &str, w: &str) -> bool {
        compile(&parse(p).unwrap()).accepts_sig(&Signature::parse(w).unwrap())
    }

    #[test]
    fn peak_language() {
        let p = "<(<|=)*(>|=)*>";
        assert!(accepts(p, "<>"));
        assert!(accepts(p, "<<=>"));
        assert!(accepts(p, "<=>=>"));
        assert!(!accepts(p, "<><>"));
        assert!(!accepts(p, "=<>"));
    }

    #[test]
    fn zigzag_language() {
        let p = "(<>)+<(>|ε) | (><)+>(<|ε)";
        for w in ["<><", "<><>", "><>", "><><", "<><><"] {
            assert!(accepts(p, w), "{}", w);
        }
        for w in ["<>", "<<>", "<>>"] {
            assert!(!accepts(p, w), "{}", w);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse("(<").is_err());
        assert!(parse("<a").is_err());
        assert_eq!(parse("").unwrap(), Regex::Epsilon);
    }

    #[test]
    fn display_roundtrip_language() {
        for p in ["<(<|=)*(>|=)*>", ">=+<", "(>(>|=)*)*>", "(<>)+<(>|ε)|(><)+>(<|ε)"] {
            let r = parse(p).unwrap();
            let again = parse(&to_pattern_string(&r)).unwrap();
            assert_eq!(compile(&r), compile(&again));
        }
    }
}
