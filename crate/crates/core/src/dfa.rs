//! Partial deterministic automata over {<,=,>}. A missing transition goes to an
//! implicit dead state.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::symbol::{Signature, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub trans: Vec<[Option<usize>; 3]>,
    pub initial: usize,
    pub accepting: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanguageClass {
    Empty,
    Finite { longest_word_len: usize },
    Infinite,
}

impl Dfa {
    /// One non-accepting state and no transitions.
    pub fn empty() -> Dfa {
        Dfa { trans: vec![[None; 3]], initial: 0, accepting: vec![false] }
    }

    /// Accepts every word.
    pub fn universal() -> Dfa {
        Dfa { trans: vec![[Some(0); 3]], initial: 0, accepting: vec![true] }
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn step(&self, q: usize, s: Symbol) -> Option<usize> {
        self.trans[q][s.index()]
    }

    pub fn run(&self, word: &[Symbol]) -> Option<usize> {
        let mut q = self.initial;
        for &s in word {
            q = self.step(q, s)?;
        }
        Some(q)
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        self.run(word).is_some_and(|q| self.accepting[q])
    }

    pub fn accepts_sig(&self, sig: &Signature) -> bool {
        self.accepts(sig.symbols())
    }

    /// Automaton of {w : accept(len(w))} for a length set that is periodic with `period`
    /// from `offset` on; `accept` is queried on 0..offset+period.
    pub fn length_automaton(offset: usize, period: usize, accept: impl Fn(usize) -> bool) -> Dfa {
        let period = period.max(1);
        let n = offset + period;
        let mut trans = Vec::with_capacity(n);
        let mut accepting = Vec::with_capacity(n);
        for i in 0..n {
            let next = if i + 1 < n { i + 1 } else { offset };
            trans.push([Some(next); 3]);
            accepting.push(accept(i));
        }
        minimize(&Dfa { trans, initial: 0, accepting })
    }

    pub fn complete(&self) -> Dfa {
        let dead = self.trans.len();
        let mut trans: Vec<[Option<usize>; 3]> = self
            .trans
            .iter()
            .map(|row| [Some(row[0].unwrap_or(dead)), Some(row[1].unwrap_or(dead)), Some(row[2].unwrap_or(dead))])
            .collect();
        trans.push([Some(dead); 3]);
        let mut accepting = self.accepting.clone();
        accepting.push(false);
        Dfa { trans, initial: self.initial, accepting }
    }

    pub fn complement(&self) -> Dfa {
        let mut c = self.complete();
        for a in &mut c.accepting {
            *a = !*a;
        }
        c
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for t in self.trans[q].iter().flatten() {
                if !seen[*t] {
                    seen[*t] = true;
                    stack.push(*t);
                }
            }
        }
        seen
    }

    fn co_reachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev = vec![Vec::new(); n];
        for (q, row) in self.trans.iter().enumerate() {
            for t in row.iter().flatten() {
                rev[*t].push(q);
            }
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| seen[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Keep states that are reachable and co-reachable. The initial state is kept
    /// even when useless so that the result is a well-formed automaton.
    pub fn trim(&self) -> Dfa {
        let r = self.reachable();
        let c = self.co_reachable();
        let keep: Vec<bool> = (0..self.num_states()).map(|q| r[q] && c[q]).collect();
        if !keep[self.initial] {
            return Dfa::empty();
        }
        let mut map = vec![usize::MAX; self.num_states()];
        let mut order = Vec::new();
        // BFS numbering keeps the result canonical.
        let mut queue = VecDeque::from([self.initial]);
        map[self.initial] = 0;
        order.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for t in self.trans[q].iter().flatten() {
                if keep[*t] && map[*t] == usize::MAX {
                    map[*t] = order.len();
                    order.push(*t);
                    queue.push_back(*t);
                }
            }
        }
        let trans = order
            .iter()
            .map(|&q| {
                let mut row = [None; 3];
                for (i, t) in self.trans[q].iter().enumerate() {
                    if let Some(t) = t {
                        if keep[*t] {
                            row[i] = Some(map[*t]);
                        }
                    }
                }
                row
            })
            .collect();
        let accepting = order.iter().map(|&q| self.accepting[q]).collect();
        Dfa { trans, initial: 0, accepting }
    }

    /// Shortest accepted word, lexicographically smallest among the shortest.
    pub fn shortest_word(&self) -> Option<Vec<Symbol>> {
        let n = self.num_states();
        let mut prev: Vec<Option<(usize, Symbol)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            if self.accepting[q] {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, s)) = prev[cur] {
                    word.push(s);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for s in Symbol::ALL {
                if let Some(t) = self.step(q, s) {
                    if !seen[t] {
                        seen[t] = true;
                        prev[t] = Some((q, s));
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }

    /// Number of accepted words of each length 0..=max_len.
    pub fn count_by_length(&self, max_len: usize) -> Vec<u128> {
        let mut cur = vec![0u128; self.num_states()];
        cur[self.initial] = 1;
        let mut out = Vec::with_capacity(max_len + 1);
        for len in 0..=max_len {
            out.push((0..self.num_states()).filter(|&q| self.accepting[q]).map(|q| cur[q]).sum());
            if len == max_len {
                break;
            }
            let mut next = vec![0u128; self.num_states()];
            for (q, row) in self.trans.iter().enumerate() {
                if cur[q] == 0 {
                    continue;
                }
                for t in row.iter().flatten() {
                    next[*t] += cur[q];
                }
            }
            cur = next;
        }
        out
    }
}

/// Synchronous product restricted to reachable pairs; accepting iff both accept.
pub fn intersect(a: &Dfa, b: &Dfa) -> Dfa {
    let mut index = BTreeMap::new();
    let mut pairs = vec![(a.initial, b.initial)];
    index.insert((a.initial, b.initial), 0usize);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        let mut row = [None; 3];
        for s in Symbol::ALL {
            if let (Some(p2), Some(q2)) = (a.step(p, s), b.step(q, s)) {
                let next = pairs.len();
                let id = *index.entry((p2, q2)).or_insert_with(|| {
                    pairs.push((p2, q2));
                    next
                });
                row[s.index()] = Some(id);
            }
        }
        trans.push(row);
        i += 1;
    }
    let accepting = pairs.iter().map(|&(p, q)| a.accepting[p] && b.accepting[q]).collect();
    Dfa { trans, initial: 0, accepting }
}

pub fn intersect_all(dfas: &[Dfa]) -> Dfa {
    let mut it = dfas.iter();
    let Some(first) = it.next() else {
        return Dfa::universal();
    };
    it.fold(first.clone(), |acc, d| intersect(&acc, d))
}

/// Trim, then Hopcroft partition refinement. Returns the canonical minimal partial DFA.
pub fn minimize(a: &Dfa) -> Dfa {
    let t = a.trim();
    if !t.accepting.iter().any(|&x| x) {
        return Dfa::empty();
    }
    let n = t.num_states();
    // Work on the completed automaton so the partition refinement sees the dead state.
    let c = t.complete();
    let total = n + 1;
    let mut rev = vec![[Vec::new(), Vec::new(), Vec::new()]; total];
    for (q, row) in c.trans.iter().enumerate() {
        for (i, t) in row.iter().enumerate() {
            rev[t.unwrap()][i].push(q);
        }
    }
    let mut block = vec![0usize; total];
    let acc: Vec<usize> = (0..total).filter(|&q| c.accepting[q]).collect();
    let rej: Vec<usize> = (0..total).filter(|&q| !c.accepting[q]).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for part in [acc, rej] {
        if !part.is_empty() {
            let id = blocks.len();
            for &q in &part {
                block[q] = id;
            }
            blocks.push(part);
        }
    }
    let mut work: BTreeSet<(usize, usize)> = BTreeSet::new();
    for b in 0..blocks.len() {
        for s in 0..3 {
            work.insert((b, s));
        }
    }
    while let Some(&(b, s)) = work.iter().next() {
        work.remove(&(b, s));
        let mut pre = BTreeSet::new();
        for &q in &blocks[b] {
            for &p in &rev[q][s] {
                pre.insert(p);
            }
        }
        let touched: BTreeSet<usize> = pre.iter().map(|&p| block[p]).collect();
        for y in touched {
            let (inside, outside): (Vec<usize>, Vec<usize>) = blocks[y].iter().partition(|q| pre.contains(q));
            if inside.is_empty() || outside.is_empty() {
                continue;
            }
            let new_id = blocks.len();
            let (keep, moved) = if inside.len() <= outside.len() { (outside, inside) } else { (inside, outside) };
            for &q in &moved {
                block[q] = new_id;
            }
            blocks[y] = keep;
            blocks.push(moved);
            for s2 in 0..3 {
                if work.contains(&(y, s2)) {
                    work.insert((new_id, s2));
                } else {
                    work.insert((new_id, s2));
                    work.insert((y, s2));
                }
            }
        }
    }
    let dead_block = block[n];
    let mut quotient_trans = vec![[None; 3]; blocks.len()];
    let mut quotient_acc = vec![false; blocks.len()];
    for q in 0..total {
        let b = block[q];
        quotient_acc[b] = c.accepting[q];
        for s in 0..3 {
            let t = block[c.trans[q][s].unwrap()];
            quotient_trans[b][s] = if t == dead_block { None } else { Some(t) };
        }
    }
    Dfa { trans: quotient_trans, initial: block[c.initial], accepting: quotient_acc }.trim()
}

pub fn language_class(a: &Dfa) -> LanguageClass {
    let t = a.trim();
    if !t.accepting.iter().any(|&x| x) {
        return LanguageClass::Empty;
    }
    let n = t.num_states();
    let order = topo_order(&t);
    if order.len() < n {
        return LanguageClass::Infinite;
    }
    let mut best_to_acc = vec![None::<usize>; n];
    for &q in order.iter().rev() {
        let mut b = if t.accepting[q] { Some(0) } else { None };
        for nxt in t.trans[q].iter().flatten() {
            if let Some(v) = best_to_acc[*nxt] {
                b = Some(b.map_or(v + 1, |x: usize| x.max(v + 1)));
            }
        }
        best_to_acc[q] = b;
    }
    LanguageClass::Finite { longest_word_len: best_to_acc[t.initial].unwrap_or(0) }
}

fn topo_order(t: &Dfa) -> Vec<usize> {
    let n = t.num_states();
    let mut indeg = vec![0usize; n];
    for row in &t.trans {
        for nxt in row.iter().flatten() {
            indeg[*nxt] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&q| indeg[q] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(q) = queue.pop_front() {
        order.push(q);
        for nxt in t.trans[q].iter().flatten() {
            indeg[*nxt] -= 1;
            if indeg[*nxt] == 0 {
                queue.push_back(*nxt);
            }
        }
    }
    order
}

fn bfs_dist(t: &Dfa, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; t.num_states()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        let d = dist[q].unwrap();
        for nxt in t.trans[q].iter().flatten() {
            if dist[*nxt].is_none() {
                dist[*nxt] = Some(d + 1);
                queue.push_back(*nxt);
            }
        }
    }
    dist
}

/// States lying on a closed walk of length exactly `d`.
pub fn states_on_cycle_of_length(t: &Dfa, d: usize) -> Vec<bool> {
    let n = t.num_states();
    (0..n)
        .map(|q| {
            let mut cur = vec![false; n];
            cur[q] = true;
            for _ in 0..d {
                let mut next = vec![false; n];
                for (p, row) in t.trans.iter().enumerate() {
                    if cur[p] {
                        for nxt in row.iter().flatten() {
                            next[*nxt] = true;
                        }
                    }
                }
                cur = next;
            }
            cur[q]
        })
        .collect()
}

/// Minimal accepted-word length among accepting paths that visit a state lying on a
/// closed walk of length `d`.
pub fn min_length_through_cycle(a: &Dfa, d: usize) -> Option<usize> {
    let t = a.trim();
    if !t.accepting.iter().any(|&x| x) || d == 0 {
        return None;
    }
    let on_cycle = states_on_cycle_of_length(&t, d);
    let from_init = bfs_dist(&t, t.initial);
    let mut best: Option<usize> = None;
    for q in 0..t.num_states() {
        if !on_cycle[q] {
            continue;
        }
        let Some(d0) = from_init[q] else { continue };
        let dq = bfs_dist(&t, q);
        let to_acc = (0..t.num_states()).filter(|&x| t.accepting[x]).filter_map(|x| dq[x]).min();
        if let Some(d1) = to_acc {
            let total = d0 + d1;
            best = Some(best.map_or(total, |b| b.min(total)));
        }
    }
    best
}

/// Shortest accepted word passing through a state on a cycle, pumped once around it.
pub fn pumped_witness(a: &Dfa) -> Option<(Vec<Symbol>, Vec<Symbol>)> {
    let t = a.trim();
    if !t.accepting.iter().any(|&x| x) {
        return None;
    }
    let n = t.num_states();
    let mut best: Option<(Vec<Symbol>, Vec<Symbol>)> = None;
    for q in 0..n {
        let Some(cycle) = shortest_cycle_word(&t, q) else { continue };
        let Some(prefix) = path_word(&t, t.initial, |x| x == q) else { continue };
        let Some(suffix) = path_word(&t, q, |x| t.accepting[x]) else { continue };
        let mut base = prefix.clone();
        base.extend_from_slice(&suffix);
        let mut pumped = prefix;
        pumped.extend_from_slice(&cycle);
        pumped.extend_from_slice(&suffix);
        if best.as_ref().is_none_or(|(b, _)| base.len() < b.len()) {
            best = Some((base, pumped));
        }
    }
    best
}

fn path_word(t: &Dfa, from: usize, goal: impl Fn(usize) -> bool) -> Option<Vec<Symbol>> {
    let n = t.num_states();
    let mut prev: Vec<Option<(usize, Symbol)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        if goal(q) {
            let mut w = Vec::new();
            let mut cur = q;
            while let Some((p, s)) = prev[cur] {
                w.push(s);
                cur = p;
            }
            w.reverse();
            return Some(w);
        }
        for s in Symbol::ALL {
            if let Some(x) = t.step(q, s) {
                if !seen[x] {
                    seen[x] = true;
                    prev[x] = Some((q, s));
                    queue.push_back(x);
                }
            }
        }
    }
    None
}

fn shortest_cycle_word(t: &Dfa, q: usize) -> Option<Vec<Symbol>> {
    let mut best: Option<Vec<Symbol>> = None;
    for s in Symbol::ALL {
        if let Some(x) = t.step(q, s) {
            if let Some(mut w) = path_word(t, x, |y| y == q) {
                w.insert(0, s);
                if best.as_ref().is_none_or(|b| w.len() < b.len()) {
                    best = Some(w);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::enumerate_signatures;

    fn lit(words: &[&str]) -> Dfa {
        // trie automaton
        let mut trans = vec![[None; 3]];
        let mut acc = vec![false];
        for w in words {
            let mut q = 0;
            for c in w.chars() {
                let s = Symbol::from_char(c).unwrap().index();
                q = match trans[q][s] {
                    Some(x) => x,
                    None => {
                        trans.push([None; 3]);
                        acc.push(false);
                        let x = trans.len() - 1;
                        trans[q][s] = Some(x);
                        x
                    }
                };
            }
            acc[q] = true;
        }
        Dfa { trans, initial: 0, accepting: acc }
    }

    #[test]
    fn finite_language_longest() {
        assert_eq!(language_class(&lit(&["<", "<>"])), LanguageClass::Finite { longest_word_len: 2 });
        assert_eq!(language_class(&Dfa::empty()), LanguageClass::Empty);
        assert_eq!(language_class(&Dfa::universal()), LanguageClass::Infinite);
    }

    #[test]
    fn minimize_merges_bisimilar() {
        let d = lit(&["<", "="]);
        let m = minimize(&d);
        assert_eq!(m.num_states(), 2);
        let e = minimize(&Dfa::empty());
        assert!(e.num_states() <= 1 && !e.accepting.iter().any(|&x| x));
        let u = minimize(&intersect(&d, &Dfa::universal()));
        assert_eq!(u, m);
    }

    #[test]
    fn intersection_with_empty() {
        let d = lit(&["<", "<>"]);
        assert_eq!(language_class(&intersect(&d, &Dfa::empty())), LanguageClass::Empty);
    }

    #[test]
    fn cycle_length_queries() {
        let u = Dfa::universal();
        assert_eq!(min_length_through_cycle(&u, 1), Some(0));
        assert_eq!(min_length_through_cycle(&Dfa::empty(), 2), None);
        let even = Dfa::length_automaton(0, 2, |i| i == 0);
        assert_eq!(min_length_through_cycle(&even, 2), Some(0));
        assert_eq!(min_length_through_cycle(&even, 1), None);
        let (base, pumped) = pumped_witness(&u).unwrap();
        assert!(base.is_empty() && pumped.len() == 1);
    }

    #[test]
    fn length_automaton_counts() {
        let geq = Dfa::length_automaton(4, 1, |i| i >= 4);
        for sig in enumerate_signatures(3) {
            assert!(!geq.accepts_sig(&sig));
        }
        assert!(geq.accepts_sig(&Signature::parse("<<<<").unwrap()));
        assert_eq!(geq.count_by_length(4), vec![0, 0, 0, 0, 81]);
    }
}
