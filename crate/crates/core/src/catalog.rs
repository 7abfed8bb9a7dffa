//! The built-in pattern catalog and the constraints derived from it.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::dfa::Dfa;
use crate::regex::{compile, parse, Regex};
use crate::register::{Builder, Op, RegisterAutomaton};
use crate::transducer::{catalog_transducer, decorate_nb, separate, SeedTransducer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    One,
    Width,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegexSpec {
    pub name: String,
    pub pattern: String,
    pub b_trim: u64,
    pub a_trim: u64,
    pub omega: u64,
    /// `false` when the trims are our choice rather than fixed by the literature.
    pub trims_published: bool,
}

impl RegexSpec {
    pub fn regex(&self) -> Regex {
        parse(&self.pattern).expect("catalog pattern parses")
    }

    pub fn dfa(&self) -> Dfa {
        compile(&self.regex())
    }
}

/// `value(n) = m * floor((n - c) / d) + k` (clamped at 0 when guarded), and 0 for `n < from_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpperBoundFormula {
    pub c: i64,
    pub d: i64,
    pub m: i64,
    pub k: i64,
    pub guarded: bool,
    pub from_n: u64,
}

impl UpperBoundFormula {
    pub fn value(&self, n: u64) -> i64 {
        if n < self.from_n {
            return 0;
        }
        let v = self.m * (n as i64 - self.c).div_euclid(self.d) + self.k;
        if self.guarded {
            v.max(0)
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSpec {
    pub feature: Feature,
    pub regex: RegexSpec,
    pub upper: Option<UpperBoundFormula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogError {
    NoBound(String),
    UnknownConstraint(String),
}

impl fmt::Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogError::NoBound(n) => write!(f, "no upper bound formula for {}", n),
            CatalogError::UnknownConstraint(n) => write!(f, "unknown constraint {}", n),
        }
    }
}

impl ConstraintSpec {
    pub fn name(&self) -> String {
        match self.feature {
            Feature::One => format!("nb_{}", self.regex.name),
            Feature::Width => format!("sum_width_{}", self.regex.name),
        }
    }

    pub fn upper_bound(&self, n: u64) -> Result<u64, CatalogError> {
        let f = self.upper.ok_or_else(|| CatalogError::NoBound(self.name()))?;
        Ok(f.value(n).max(0) as u64)
    }

    pub fn upp(&self, n: u64) -> u64 {
        self.upper_bound(n).expect("catalog constraints carry a bound")
    }
}

impl fmt::Display for ConstraintSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub const PATTERNS: [&str; 8] = [
    "peak",
    "valley",
    "decreasing_terrace",
    "increasing_terrace",
    "proper_plateau",
    "decreasing_sequence",
    "increasing_sequence",
    "zigzag",
];

fn spec(name: &str, pattern: &str, b: u64, a: u64, omega: u64, published: bool) -> RegexSpec {
    RegexSpec {
        name: name.to_string(),
        pattern: pattern.to_string(),
        b_trim: b,
        a_trim: a,
        omega,
        trims_published: published,
    }
}

pub fn regex_specs() -> Vec<RegexSpec> {
    alloc::vec![
        spec("peak", "<(<|=)*(>|=)*>", 1, 1, 2, true),
        spec("valley", ">(>|=)*(<|=)*<", 1, 1, 2, true),
        spec("decreasing_terrace", ">=+>", 1, 1, 3, false),
        spec("increasing_terrace", "<=+<", 1, 1, 3, false),
        spec("proper_plateau", ">=+<", 1, 1, 3, false),
        spec("decreasing_sequence", "(>(>|=)*)*>", 0, 0, 1, false),
        spec("increasing_sequence", "(<(<|=)*)*<", 0, 0, 1, false),
        spec("zigzag", "(<>)+<(>|ε)|(><)+>(<|ε)", 1, 1, 3, false),
    ]
}

fn ub(c: i64, d: i64, from_n: u64) -> Option<UpperBoundFormula> {
    Some(UpperBoundFormula { c, d, m: 1, k: 0, guarded: true, from_n })
}

fn formula(pattern: &str, feature: Feature) -> Option<UpperBoundFormula> {
    match (pattern, feature) {
        ("peak" | "valley", Feature::One) => ub(1, 2, 1),
        ("peak" | "valley", Feature::Width) => ub(2, 1, 1),
        ("decreasing_terrace" | "increasing_terrace", Feature::One) => ub(2, 2, 1),
        ("proper_plateau" | "zigzag", Feature::One) => ub(1, 3, 1),
        ("decreasing_terrace" | "increasing_terrace" | "proper_plateau" | "zigzag", Feature::Width) => ub(2, 1, 4),
        ("decreasing_sequence" | "increasing_sequence", Feature::One) => ub(0, 2, 1),
        ("decreasing_sequence" | "increasing_sequence", Feature::Width) => ub(0, 1, 2),
        _ => None,
    }
}

/// All sixteen catalog constraints: for each pattern, nb then sum_width.
pub fn constraints() -> Vec<ConstraintSpec> {
    let mut out = Vec::new();
    for r in regex_specs() {
        for feature in [Feature::One, Feature::Width] {
            out.push(ConstraintSpec { feature, upper: formula(&r.name, feature), regex: r.clone() });
        }
    }
    out
}

pub fn constraint(name: &str) -> Result<ConstraintSpec, CatalogError> {
    constraints()
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| CatalogError::UnknownConstraint(name.to_string()))
}

impl ConstraintSpec {
    pub fn transducer(&self) -> SeedTransducer {
        catalog_transducer(&self.regex.name).expect("catalog pattern has a transducer")
    }

    pub fn separated_transducer(&self) -> SeedTransducer {
        separate(&self.transducer())
    }

    /// Register automaton whose main register holds the constraint's result.
    pub fn register_automaton(&self) -> RegisterAutomaton {
        match self.feature {
            Feature::One => decorate_nb(&self.transducer()).minimized(),
            Feature::Width => sum_width_automaton(&self.regex.name),
        }
    }
}

fn sum_width_automaton(pattern: &str) -> RegisterAutomaton {
    use Op::*;
    let k = [Keep, Keep];
    let peak = || {
        Builder::new(&["s", "r", "t"], &["D", "R"])
            .on("s", "=>", "s", &k)
            .on("s", "<", "r", &[Set(0), Keep])
            .on("r", "<=", "r", &[Add(1), Keep])
            .on("r", ">", "t", &[Set(0), Absorb(1)])
            .on("t", "=", "t", &[Add(1), Keep])
            .on("t", ">", "t", &[Set(0), Absorb(1)])
            .on("t", "<", "r", &[Set(0), Keep])
            .build("s")
    };
    let inc_terrace = || {
        Builder::new(&["a", "b", "c"], &["D", "R"])
            .on("a", "<", "b", &k)
            .on("a", "=>", "a", &k)
            .on("b", "<", "b", &k)
            .on("b", "=", "c", &[Add(1), Keep])
            .on("b", ">", "a", &k)
            .on("c", "=", "c", &[Add(1), Keep])
            .on("c", "<", "b", &[Set(0), Absorb(1)])
            .on("c", ">", "a", &[Set(0), Keep])
            .build("a")
    };
    let dec_seq = || {
        Builder::new(&["s", "t"], &["D", "R"])
            .on("s", "<=", "s", &k)
            .on("s", ">", "t", &[Set(0), Add(2)])
            .on("t", "=", "t", &[Add(1), Keep])
            .on("t", ">", "t", &[Set(0), Absorb(1)])
            .on("t", "<", "s", &[Set(0), Keep])
            .build("s")
    };
    match pattern {
        "peak" => peak(),
        "valley" => peak().mirrored(),
        "increasing_terrace" => inc_terrace(),
        "decreasing_terrace" => inc_terrace().mirrored(),
        "proper_plateau" => Builder::new(&["a", "b", "c"], &["D", "R"])
            .on("a", ">", "b", &k)
            .on("a", "<=", "a", &k)
            .on("b", ">", "b", &k)
            .on("b", "=", "c", &[Add(1), Keep])
            .on("b", "<", "a", &k)
            .on("c", "=", "c", &[Add(1), Keep])
            .on("c", ">", "b", &[Set(0), Keep])
            .on("c", "<", "a", &[Set(0), Absorb(1)])
            .build("a"),
        "decreasing_sequence" => dec_seq(),
        "increasing_sequence" => dec_seq().mirrored(),
        "zigzag" => {
            let t = catalog_transducer("zigzag").unwrap();
            let mut ra = decorate_nb(&t);
            let cont = |q: usize| matches!(t.state_names[q].as_str(), "Zl" | "Zg");
            for (q, row) in t.trans.iter().enumerate() {
                for (si, m) in row.iter().enumerate() {
                    ra.trans[q][si].updates[0].constant = if m.found { 2 } else { u64::from(cont(q) && cont(m.to)) };
                }
            }
            ra
        }
        _ => panic!("unknown pattern {}", pattern),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfa::Dfa;

    #[test]
    fn omega_matches_shortest_word() {
        for r in regex_specs() {
            let d: Dfa = r.dfa();
            assert_eq!(d.shortest_word().unwrap().len() as u64, r.omega, "{}", r.name);
            assert!(r.b_trim + r.a_trim <= r.omega + 1);
        }
    }

    #[test]
    fn names_and_lookup() {
        let all = constraints();
        assert_eq!(all.len(), 16);
        assert_eq!(constraint("sum_width_zigzag").unwrap().upp(9), 7);
        assert_eq!(constraint("nb_peak").unwrap().upp(11), 5);
        assert_eq!(constraint("nb_peak").unwrap().upp(1), 0);
        assert!(matches!(constraint("nb_nothing"), Err(CatalogError::UnknownConstraint(_))));
    }

    #[test]
    fn missing_formula_is_an_error() {
        let mut c = constraint("nb_peak").unwrap();
        c.upper = None;
        assert_eq!(c.upper_bound(3), Err(CatalogError::NoBound("nb_peak".into())));
    }

    #[test]
    fn automata_agree_with_oracle() {
        use crate::oracle::Evaluator;
        use crate::register::IncrementalReport;
        use crate::symbol::enumerate_signatures;
        for c in constraints() {
            let ra = c.register_automaton();
            assert_eq!(ra.check_incremental_property(), IncrementalReport::Pass, "{}", c.name());
            let ev = Evaluator::new(&c);
            for len in 0..=8 {
                for s in enumerate_signatures(len) {
                    assert_eq!(ra.run(s.symbols()).result, ev.eval(s.symbols()), "{} {}", c.name(), s);
                }
            }
        }
        assert_eq!(constraint("nb_peak").unwrap().register_automaton().num_states(), 2);
    }
}
