//! Brute-force semantics: maximal occurrences scanned with the pattern DFA.

use alloc::vec::Vec;

use crate::catalog::{ConstraintSpec, Feature, RegexSpec};
use crate::dfa::Dfa;
use crate::symbol::{enumerate_signatures, Signature, Symbol};

/// Inclusion-maximal factors of `word` in the language of `dfa`, as 1-based inclusive ranges.
pub fn maximal_occurrences_with(dfa: &Dfa, word: &[Symbol]) -> Vec<(usize, usize)> {
    let mut longest = Vec::new();
    for i in 0..word.len() {
        let mut q = dfa.initial;
        let mut best = None;
        for (j, &s) in word.iter().enumerate().skip(i) {
            match dfa.step(q, s) {
                Some(t) => q = t,
                None => break,
            }
            if dfa.accepting[q] {
                best = Some(j);
            }
        }
        if let Some(j) = best {
            longest.push((i, j));
        }
    }
    // Ends are nondecreasing in the start, so an interval is contained in another iff the
    // previous kept interval reaches at least as far.
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut reach = None;
    for (i, j) in longest {
        if reach.is_some_and(|r| j <= r) {
            continue;
        }
        reach = Some(j);
        out.push((i + 1, j + 1));
    }
    out
}

pub fn maximal_occurrences(regex: &RegexSpec, sig: &Signature) -> Vec<(usize, usize)> {
    maximal_occurrences_with(&regex.dfa(), sig.symbols())
}

/// A constraint with its pattern DFA compiled once.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub spec: ConstraintSpec,
    dfa: Dfa,
}

impl Evaluator {
    pub fn new(spec: &ConstraintSpec) -> Evaluator {
        Evaluator { dfa: spec.regex.dfa(), spec: spec.clone() }
    }

    pub fn widths(&self, word: &[Symbol]) -> Vec<u64> {
        let trim = self.spec.regex.b_trim + self.spec.regex.a_trim;
        maximal_occurrences_with(&self.dfa, word).into_iter().map(|(i, j)| (j - i + 2) as u64 - trim).collect()
    }

    pub fn eval(&self, word: &[Symbol]) -> u64 {
        match self.spec.feature {
            Feature::One => maximal_occurrences_with(&self.dfa, word).len() as u64,
            Feature::Width => self.widths(word).iter().sum(),
        }
    }
}

pub fn eval_constraint(spec: &ConstraintSpec, sig: &Signature) -> u64 {
    Evaluator::new(spec).eval(sig.symbols())
}

/// Maximum result over every signature of a length-`n` series.
pub fn brute_force_upper(spec: &ConstraintSpec, n: u64) -> u64 {
    let ev = Evaluator::new(spec);
    enumerate_signatures(n.saturating_sub(1) as usize).map(|s| ev.eval(s.symbols())).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{constraint, constraints, regex_specs};
    use crate::symbol::{signature_of, TimeSeries};

    fn sig(s: &str) -> Signature {
        Signature::parse(s).unwrap()
    }

    #[test]
    fn running_series_occurrences() {
        let x = signature_of(&TimeSeries(alloc::vec![0, 1, 2, 2, 0, 0, 4, 1]));
        let specs = regex_specs();
        assert_eq!(maximal_occurrences(&specs[0], &x), [(1, 4), (6, 7)]);
        assert_eq!(maximal_occurrences(&specs[1], &x), [(4, 6)]);
        assert!(maximal_occurrences(&specs[0], &sig("==")).is_empty());
        assert_eq!(eval_constraint(&constraint("nb_peak").unwrap(), &x), 2);
        assert_eq!(eval_constraint(&constraint("sum_width_peak").unwrap(), &x), 4);
        assert_eq!(eval_constraint(&constraint("nb_valley").unwrap(), &Signature::empty()), 0);
    }

    #[test]
    fn terraces_share_borders() {
        let t = &regex_specs()[2];
        assert_eq!(maximal_occurrences(t, &sig(">=>=>")), [(1, 3), (3, 5)]);
    }

    #[test]
    fn formulas_match_brute_force() {
        for c in constraints() {
            for n in 1..=11 {
                assert_eq!(c.upp(n), brute_force_upper(&c, n), "{} n={}", c.name(), n);
            }
        }
    }

    #[test]
    fn widths_positive() {
        for c in constraints().into_iter().filter(|c| c.feature == Feature::Width) {
            let ev = Evaluator::new(&c);
            for len in 0..=9 {
                for s in enumerate_signatures(len) {
                    assert!(ev.widths(s.symbols()).iter().all(|&w| w > 0), "{} {}", c.name(), s);
                }
            }
        }
    }
}
