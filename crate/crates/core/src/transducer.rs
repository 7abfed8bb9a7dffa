//! Seed transducers: recognise pattern occurrences, separate, measure regret, decorate.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::dfa::Dfa;
use crate::oracle::maximal_occurrences_with;
use crate::register::{Register, RegisterAutomaton, Transition, Update};
use crate::symbol::{enumerate_signatures, Signature, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub to: usize,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedTransducer {
    pub state_names: Vec<String>,
    pub initial: usize,
    pub trans: Vec<[Move; 3]>,
}

impl SeedTransducer {
    /// Rows are `(state, [(symbols, target, found)])`; the first row is initial.
    pub fn from_rows(rows: &[(&str, &[(&str, &str, bool)])]) -> SeedTransducer {
        let names: Vec<String> = rows.iter().map(|(n, _)| n.to_string()).collect();
        let id = |s: &str| names.iter().position(|n| n == s).expect("unknown state");
        let trans = rows
            .iter()
            .map(|(_, moves)| {
                let mut row: [Option<Move>; 3] = [None, None, None];
                for (syms, to, found) in moves.iter() {
                    for c in syms.chars() {
                        row[Symbol::from_char(c).unwrap().index()] = Some(Move { to: id(to), found: *found });
                    }
                }
                row.map(|m| m.expect("incomplete transducer"))
            })
            .collect();
        SeedTransducer { state_names: names.clone(), initial: 0, trans }
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn mirrored(&self) -> SeedTransducer {
        let mut t = self.clone();
        for row in &mut t.trans {
            row.swap(0, 2);
        }
        t
    }

    /// Output phases along `word` (true = found).
    pub fn outputs(&self, word: &[Symbol]) -> Vec<bool> {
        let mut q = self.initial;
        word.iter()
            .map(|&s| {
                let m = &self.trans[q][s.index()];
                q = m.to;
                m.found
            })
            .collect()
    }

    pub fn found_count(&self, word: &[Symbol]) -> usize {
        self.outputs(word).iter().filter(|&&f| f).count()
    }

    fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            for m in &self.trans[order[i]] {
                if !seen[m.to] {
                    seen[m.to] = true;
                    order.push(m.to);
                }
            }
            i += 1;
        }
        order
    }

    /// Renumber reachable states in BFS order.
    pub fn canonical(&self) -> SeedTransducer {
        let order = self.reachable();
        let mut map = vec![usize::MAX; self.num_states()];
        for (i, &q) in order.iter().enumerate() {
            map[q] = i;
        }
        SeedTransducer {
            state_names: order.iter().map(|&q| self.state_names[q].clone()).collect(),
            initial: 0,
            trans: order
                .iter()
                .map(|&q| self.trans[q].clone().map(|m| Move { to: map[m.to], found: m.found }))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checked: usize,
    pub counterexamples: Vec<Signature>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Compare found counts with the occurrence oracle on every word up to `max_len`.
pub fn validate_transducer(t: &SeedTransducer, pattern: &Dfa, max_len: usize) -> ValidationReport {
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for len in 0..=max_len {
        for s in enumerate_signatures(len) {
            checked += 1;
            if t.found_count(s.symbols()) != maximal_occurrences_with(pattern, s.symbols()).len() && counterexamples.len() < 10 {
                counterexamples.push(s);
            }
        }
    }
    ValidationReport { checked, counterexamples }
}

/// Pair each state with a found-seen bit; post-found copies get a prime.
pub fn separate(t: &SeedTransducer) -> SeedTransducer {
    let mut index: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    let mut keys = vec![(t.initial, false)];
    index.insert(keys[0], 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let (q, bit) = keys[i];
        let row = t.trans[q].clone().map(|m| {
            let key = (m.to, bit || m.found);
            let id = *index.entry(key).or_insert_with(|| {
                keys.push(key);
                keys.len() - 1
            });
            Move { to: id, found: m.found }
        });
        trans.push(row);
        i += 1;
    }
    // A state keeps its name when only one copy exists.
    let names = keys
        .iter()
        .map(|&(q, bit)| {
            let both = index.contains_key(&(q, !bit));
            if bit && both {
                format!("{}'", t.state_names[q])
            } else {
                t.state_names[q].clone()
            }
        })
        .collect();
    SeedTransducer { state_names: names, initial: 0, trans }
}

/// Shortest number of moves from each state that ends with a found move.
pub fn shortest_found_paths(t: &SeedTransducer) -> Vec<Option<u64>> {
    let n = t.num_states();
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();
    for (q, row) in t.trans.iter().enumerate() {
        for m in row {
            rev[m.to].push(q);
        }
        if row.iter().any(|m| m.found) {
            dist[q] = Some(1);
            queue.push_back(q);
        }
    }
    while let Some(q) = queue.pop_front() {
        let d = dist[q].unwrap();
        for &p in &rev[q] {
            if dist[p].is_none() {
                dist[p] = Some(d + 1);
                queue.push_back(p);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePathFacts {
    pub shortest_found: Vec<u64>,
    /// `regret[q][symbol]`.
    pub regret: Vec<[i64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransducerError {
    NoFoundPath(String),
    Inhomogeneous(String),
}

impl core::fmt::Display for TransducerError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TransducerError::NoFoundPath(s) => write!(f, "state {} cannot reach a found transition", s),
            TransducerError::Inhomogeneous(s) => write!(f, "{}", s),
        }
    }
}

pub fn regrets(t: &SeedTransducer) -> Result<PhasePathFacts, TransducerError> {
    let dist = shortest_found_paths(t);
    let mut l = Vec::with_capacity(dist.len());
    for (q, d) in dist.iter().enumerate() {
        l.push(d.ok_or_else(|| TransducerError::NoFoundPath(t.state_names[q].clone()))?);
    }
    let regret = t
        .trans
        .iter()
        .enumerate()
        .map(|(q, row)| {
            row.clone().map(|m| if m.found { 1 - l[q] as i64 } else { 1 + l[m.to] as i64 - l[q] as i64 })
        })
        .collect();
    Ok(PhasePathFacts { shortest_found: l, regret })
}

/// `(C, D)` such that the maximum number of occurrences is `floor((n - C) / D)`.
pub fn homogeneity_check(t: &SeedTransducer) -> Result<(i64, u64), TransducerError> {
    let facts = regrets(t)?;
    let l = &facts.shortest_found;
    let mut d = None;
    for row in &t.trans {
        for m in row.iter().filter(|m| m.found) {
            match d {
                None => d = Some(l[m.to]),
                Some(x) if x != l[m.to] => {
                    return Err(TransducerError::Inhomogeneous(format!(
                        "found destinations at distances {} and {}",
                        x, l[m.to]
                    )))
                }
                _ => {}
            }
        }
    }
    let d = d.ok_or_else(|| TransducerError::NoFoundPath(t.state_names[t.initial].clone()))?;
    Ok((l[t.initial] as i64 - d as i64 + 1, d))
}

fn keep_all(r: usize) -> Vec<Update> {
    (0..r).map(|j| Update::keep(r, j)).collect()
}

/// One register incremented on found moves.
pub fn decorate_nb(t: &SeedTransducer) -> RegisterAutomaton {
    let trans = t
        .trans
        .iter()
        .map(|row| {
            row.clone().map(|m| Transition {
                to: m.to,
                updates: vec![Update { constant: u64::from(m.found), coeffs: vec![1] }],
            })
        })
        .collect();
    RegisterAutomaton {
        state_names: t.state_names.clone(),
        initial: t.initial,
        accepting: vec![true; t.num_states()],
        registers: vec![Register { name: "R".into(), init: 0 }],
        acceptance: vec![1],
        trans,
    }
}

/// Registers C, D, R; returns R + C, the loss of the series.
pub fn decorate_loss_nb(t: &SeedTransducer) -> Result<RegisterAutomaton, TransducerError> {
    let facts = regrets(t)?;
    let trans = t
        .trans
        .iter()
        .enumerate()
        .map(|(q, row)| {
            let mut out = [0, 1, 2].map(|_| Transition { to: 0, updates: keep_all(3) });
            for (si, m) in row.iter().enumerate() {
                let updates = if m.found {
                    vec![
                        Update { constant: 0, coeffs: vec![0, 0, 0] },
                        Update { constant: 0, coeffs: vec![0, 0, 0] },
                        Update { constant: 0, coeffs: vec![0, 1, 1] },
                    ]
                } else {
                    let r = facts.regret[q][si];
                    assert!(r >= 0, "negative regret");
                    vec![
                        Update { constant: 1, coeffs: vec![1, 0, 0] },
                        Update { constant: r as u64, coeffs: vec![0, 1, 0] },
                        Update { constant: 0, coeffs: vec![0, 0, 1] },
                    ]
                };
                out[si] = Transition { to: m.to, updates };
            }
            out
        })
        .collect();
    Ok(RegisterAutomaton {
        state_names: t.state_names.clone(),
        initial: t.initial,
        accepting: vec![true; t.num_states()],
        registers: ["C", "D", "R"].iter().map(|n| Register { name: n.to_string(), init: 0 }).collect(),
        acceptance: vec![1, 0, 1],
        trans,
    })
}

/// Before-found / after-found classification of a loss automaton's states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundSplit {
    pub after: Vec<bool>,
}

pub fn before_after_found_split(loss: &RegisterAutomaton) -> Result<FoundSplit, String> {
    let n = loss.num_states();
    let main = loss.main();
    let mut seen = vec![[false; 2]; n];
    let mut stack = vec![(loss.initial, 0usize)];
    seen[loss.initial][0] = true;
    while let Some((q, bit)) = stack.pop() {
        for t in &loss.trans[q] {
            let b = if t.updates[main].is_identity(main) { bit } else { 1 };
            if !seen[t.to][b] {
                seen[t.to][b] = true;
                stack.push((t.to, b));
            }
        }
    }
    if let Some(q) = (0..n).find(|&q| seen[q][0] && seen[q][1]) {
        return Err(format!("state {} is both before-found and after-found", loss.state_names[q]));
    }
    Ok(FoundSplit { after: (0..n).map(|q| seen[q][1]).collect() })
}

/// Hand-encoded transducer for a catalog pattern.
pub fn catalog_transducer(pattern: &str) -> Option<SeedTransducer> {
    let peak = || {
        SeedTransducer::from_rows(&[
            ("s", &[("<", "r", false), ("=>", "s", false)]),
            ("r", &[("<=", "r", false), (">", "t", true)]),
            ("t", &[("<", "r", false), ("=>", "t", false)]),
        ])
    };
    let dec_terrace = || {
        SeedTransducer::from_rows(&[
            ("s", &[(">", "r", false), ("=<", "s", false)]),
            ("r", &[("=", "t", false), (">", "r", false), ("<", "s", false)]),
            ("t", &[("=", "t", false), (">", "r", true), ("<", "s", false)]),
        ])
    };
    let dec_seq = || {
        SeedTransducer::from_rows(&[
            ("s", &[(">", "t", true), ("<=", "s", false)]),
            ("t", &[(">=", "t", false), ("<", "s", false)]),
        ])
    };
    Some(match pattern {
        "peak" => peak(),
        "valley" => peak().mirrored(),
        "decreasing_terrace" => dec_terrace(),
        "increasing_terrace" => dec_terrace().mirrored(),
        "proper_plateau" => SeedTransducer::from_rows(&[
            ("s", &[(">", "r", false), ("<=", "s", false)]),
            ("r", &[("=", "t", false), (">", "r", false), ("<", "s", false)]),
            ("t", &[("=", "t", false), ("<", "s", true), (">", "r", false)]),
        ]),
        "decreasing_sequence" => dec_seq(),
        "increasing_sequence" => dec_seq().mirrored(),
        "zigzag" => SeedTransducer::from_rows(&[
            ("s", &[("<", "A1", false), (">", "B1", false), ("=", "s", false)]),
            ("A1", &[(">", "A2", false), ("<", "A1", false), ("=", "s", false)]),
            ("B1", &[("<", "B2", false), (">", "B1", false), ("=", "s", false)]),
            ("A2", &[("<", "Zl", true), (">", "B1", false), ("=", "s", false)]),
            ("B2", &[(">", "Zg", true), ("<", "A1", false), ("=", "s", false)]),
            ("Zl", &[(">", "Zg", false), ("<", "A1", false), ("=", "s", false)]),
            ("Zg", &[("<", "Zl", false), (">", "B1", false), ("=", "s", false)]),
        ]),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::regex_specs;

    fn sig(s: &str) -> Signature {
        Signature::parse(s).unwrap()
    }

    #[test]
    fn peak_found_positions() {
        let t = catalog_transducer("peak").unwrap();
        let out = t.outputs(sig("<<=>=<>").symbols());
        let pos: Vec<usize> = out.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i + 1).collect();
        assert_eq!(pos, [4, 7]);
    }

    #[test]
    fn always_found_fails() {
        let t = SeedTransducer::from_rows(&[("s", &[("<=>", "s", true)])]);
        let rep = validate_transducer(&t, &regex_specs()[0].dfa(), 3);
        assert!(!rep.passed());
        assert_eq!(rep.counterexamples[0], sig("<"));
        assert!(rep.counterexamples.contains(&sig("=")));
    }

    #[test]
    fn peak_separation_and_regret() {
        let t = separate(&catalog_transducer("peak").unwrap());
        assert_eq!(t.num_states(), 4);
        let names: Vec<&str> = t.state_names.iter().map(|s| s.as_str()).collect();
        assert_eq!(names, ["s", "r", "t", "r'"]);
        let f = regrets(&t).unwrap();
        let zero: Vec<(usize, usize)> = (0..4)
            .flat_map(|q| (0..3).map(move |s| (q, s)))
            .filter(|&(q, s)| t.trans[q][s].to != q)
            .collect();
        for (q, s) in zero {
            assert_eq!(f.regret[q][s], 0, "{} {}", t.state_names[q], s);
        }
        let loops = (0..4).flat_map(|q| (0..3).map(move |s| (q, s))).filter(|&(q, s)| t.trans[q][s].to == q).count();
        assert_eq!(loops, 8);
        for q in 0..4 {
            for s in 0..3 {
                if t.trans[q][s].to == q {
                    assert_eq!(f.regret[q][s], 1);
                }
            }
        }
        assert_eq!(separate(&t).canonical(), t.canonical());
    }

    #[test]
    fn homogeneity_constants() {
        let expect = [
            ("peak", (1, 2)),
            ("valley", (1, 2)),
            ("decreasing_terrace", (2, 2)),
            ("increasing_terrace", (2, 2)),
            ("proper_plateau", (1, 3)),
            ("decreasing_sequence", (0, 2)),
            ("increasing_sequence", (0, 2)),
            ("zigzag", (1, 3)),
        ];
        for (p, cd) in expect {
            let t = separate(&catalog_transducer(p).unwrap());
            assert_eq!(homogeneity_check(&t).unwrap(), cd, "{}", p);
        }
        let bad = SeedTransducer::from_rows(&[
            ("s", &[("<", "a", true), (">", "b", true), ("=", "s", false)]),
            ("a", &[("<", "s", false), ("=>", "a", false)]),
            ("b", &[("<", "a", false), ("=>", "b", false)]),
        ]);
        assert!(matches!(homogeneity_check(&bad), Err(TransducerError::Inhomogeneous(_))));
    }

    #[test]
    fn split_of_peak_loss() {
        let sep = separate(&catalog_transducer("peak").unwrap());
        let loss = decorate_loss_nb(&sep).unwrap();
        let split = before_after_found_split(&loss).unwrap();
        assert_eq!(split.after, [false, false, true, true]);
        let raw = decorate_loss_nb(&catalog_transducer("peak").unwrap()).unwrap();
        let err = before_after_found_split(&raw).unwrap_err();
        assert!(err.contains("state r "), "{}", err);
        let none = SeedTransducer::from_rows(&[("s", &[("<=>", "s", false)])]);
        let ra = decorate_nb(&none);
        assert_eq!(before_after_found_split(&ra).unwrap().after, [false]);
    }

    #[test]
    fn loss_of_paper_series() {
        use crate::symbol::{signature_of, TimeSeries};
        let loss = decorate_loss_nb(&separate(&catalog_transducer("peak").unwrap())).unwrap();
        let x = signature_of(&TimeSeries(alloc::vec![1, 1, 2, 1, 2, 1, 1, 2, 1, 2]));
        assert_eq!(loss.run_sig(&x).result, 3);
        let y = signature_of(&TimeSeries(alloc::vec![1, 2, 1, 2, 1, 2, 1]));
        assert_eq!(loss.run_sig(&y).result, 0);
    }
}
