//! A small depth-first search over signatures that finds a series with two prescribed
//! constraint results, optionally pruning with linear invariants.

use alloc::vec;
use alloc::vec::Vec;

use crate::catalog::ConstraintSpec;
use crate::digraph::{bellman_ford, ShortestPaths, WeightedDigraph};
use crate::register::RegisterAutomaton;
use crate::symbol::{Signature, Symbol, TimeSeries};
use crate::synthesis::LinearInvariant;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchStats {
    pub backtracks: u64,
    pub nodes: u64,
    pub solved: bool,
    pub witness: Option<TimeSeries>,
    /// The node budget ran out before the search finished.
    pub exhausted: bool,
}

/// Per-constraint data: increment bounds by state and remaining length, and the offset
/// between an increment from a state and the result of the same word from the start.
struct Track {
    ra: RegisterAutomaton,
    inc_min: Vec<Vec<u64>>,
    inc_max: Vec<Vec<u64>>,
    offset: Option<Vec<(i64, i64)>>,
    /// One additive register: increments are exact and `inc_*` are meaningful.
    single: bool,
}

fn step_gain(ra: &RegisterAutomaton, q: usize, s: Symbol) -> Option<u64> {
    let u = &ra.trans[q][s.index()].updates[0];
    (ra.num_registers() == 1 && u.coeffs == [1]).then_some(u.constant)
}

impl Track {
    fn new(spec: &ConstraintSpec, max_len: usize) -> Track {
        let ra = spec.register_automaton();
        let nq = ra.num_states();
        let single = (0..nq).all(|q| Symbol::ALL.iter().all(|&s| step_gain(&ra, q, s).is_some()));
        let mut inc_min = vec![vec![0u64; max_len + 1]; nq];
        let mut inc_max = vec![vec![if single { 0 } else { u64::MAX }; max_len + 1]; nq];
        if single {
            for m in 1..=max_len {
                for q in 0..nq {
                    let opts = Symbol::ALL.map(|s| (step_gain(&ra, q, s).unwrap(), ra.trans[q][s.index()].to));
                    inc_min[q][m] = opts.iter().map(|&(g, t)| g + inc_min[t][m - 1]).min().unwrap();
                    inc_max[q][m] = opts.iter().map(|&(g, t)| g + inc_max[t][m - 1]).max().unwrap();
                }
            }
        }
        let offset = if single { offsets(&ra) } else { None };
        Track { ra, inc_min, inc_max, offset, single }
    }
}

/// For every state q, bounds on `gain from q - gain from the initial state` over all words,
/// or `None` when some cycle makes the difference unbounded.
fn offsets(ra: &RegisterAutomaton) -> Option<Vec<(i64, i64)>> {
    let nq = ra.num_states();
    let id = |a: usize, b: usize| a * nq + b;
    let mut lo_graph = WeightedDigraph::new(nq * nq);
    let mut hi_graph = WeightedDigraph::new(nq * nq);
    for a in 0..nq {
        for b in 0..nq {
            for s in Symbol::ALL {
                let w = step_gain(ra, a, s)? as i64 - step_gain(ra, b, s)? as i64;
                let (ta, tb) = (ra.trans[a][s.index()].to, ra.trans[b][s.index()].to);
                lo_graph.add_arc(id(a, b), id(ta, tb), w, 0);
                hi_graph.add_arc(id(a, b), id(ta, tb), -w, 0);
            }
        }
    }
    let mut out = Vec::with_capacity(nq);
    for q in 0..nq {
        let src = id(q, ra.initial);
        let lo = match bellman_ford(&lo_graph, src) {
            ShortestPaths::Distances(d) => d.iter().flatten().copied().min().unwrap_or(0),
            ShortestPaths::NegativeCycle(_) => return None,
        };
        let hi = match bellman_ford(&hi_graph, src) {
            ShortestPaths::Distances(d) => -d.iter().flatten().copied().min().unwrap_or(0),
            ShortestPaths::NegativeCycle(_) => return None,
        };
        out.push((lo, hi));
    }
    Some(out)
}

pub struct DemoSolver<'a> {
    specs: [&'a ConstraintSpec; 2],
    tracks: [Track; 2],
    records: Vec<LinearInvariant>,
    n: u64,
}

struct Search {
    word: Vec<Symbol>,
    nodes: u64,
    backtracks: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> DemoSolver<'a> {
    /// `records` are the linear invariants used when pruning is switched on.
    pub fn new(specs: [&'a ConstraintSpec; 2], n: u64, records: &[LinearInvariant]) -> DemoSolver<'a> {
        let len = n.saturating_sub(1) as usize;
        DemoSolver {
            specs,
            tracks: [Track::new(specs[0], len), Track::new(specs[1], len)],
            records: records.iter().filter(|r| r.coeffs.len() == 2).cloned().collect(),
            n,
        }
    }

    fn invariants_allow(&self, n: u64, r: [u64; 2]) -> bool {
        self.records.iter().all(|inv| inv.holds(n, &r))
    }

    /// Some suffix result pair compatible with the remaining increments satisfies every invariant.
    fn suffix_allows(&self, states: [usize; 2], need: [u64; 2], rest: usize) -> bool {
        if rest == 0 {
            return true;
        }
        let n = rest as u64 + 1;
        let mut ranges = [(0i64, 0i64); 2];
        for i in 0..2 {
            let Some(off) = &self.tracks[i].offset else { return true };
            let (lo, hi) = off[states[i]];
            let upp = self.specs[i].upp(n) as i64;
            ranges[i] = ((need[i] as i64 - hi).max(0), (need[i] as i64 - lo).min(upp));
        }
        (ranges[0].0..=ranges[0].1).any(|a| (ranges[1].0..=ranges[1].1).any(|b| self.invariants_allow(n, [a as u64, b as u64])))
    }

    pub fn solve(&self, targets: [u64; 2], use_invariants: bool, node_budget: u64) -> SearchStats {
        let len = self.n.saturating_sub(1) as usize;
        let mut s = Search { word: Vec::with_capacity(len), nodes: 0, backtracks: 0, budget: node_budget, exhausted: false };
        let root_ok = !use_invariants || self.n < 2 || self.invariants_allow(self.n, targets);
        let start = [self.tracks[0].ra.initial, self.tracks[1].ra.initial];
        let init = [self.tracks[0].ra.init_values(), self.tracks[1].ra.init_values()];
        let solved = root_ok && self.dfs(&mut s, start, init, targets, len, use_invariants);
        SearchStats {
            backtracks: s.backtracks,
            nodes: s.nodes,
            solved,
            witness: solved.then(|| Signature(s.word.clone()).to_series()),
            exhausted: s.exhausted,
        }
    }

    fn dfs(&self, s: &mut Search, states: [usize; 2], vals: [Vec<u64>; 2], targets: [u64; 2], rest: usize, inv: bool) -> bool {
        s.nodes += 1;
        if s.nodes > s.budget {
            s.exhausted = true;
            return false;
        }
        let mut need = [0; 2];
        for i in 0..2 {
            let t = &self.tracks[i];
            // The main register never decreases and bounds the result from below.
            let main = vals[i][t.ra.main()];
            if main > targets[i] {
                return false;
            }
            if t.single {
                need[i] = targets[i] - main;
                if need[i] < t.inc_min[states[i]][rest] || need[i] > t.inc_max[states[i]][rest] {
                    return false;
                }
            }
        }
        if inv && self.tracks.iter().all(|t| t.single) && !self.suffix_allows(states, need, rest) {
            return false;
        }
        if rest == 0 {
            return (0..2).all(|i| self.tracks[i].ra.result_of(&vals[i]) == targets[i]);
        }
        for sym in Symbol::ALL {
            let (q0, v0) = self.tracks[0].ra.step_values(states[0], sym, &vals[0]);
            let (q1, v1) = self.tracks[1].ra.step_values(states[1], sym, &vals[1]);
            s.word.push(sym);
            if self.dfs(s, [q0, q1], [v0, v1], targets, rest - 1, inv) {
                return true;
            }
            s.word.pop();
            s.backtracks += 1;
            if s.exhausted {
                return false;
            }
        }
        false
    }
}

pub fn demo_solve(specs: [&ConstraintSpec; 2], targets: [u64; 2], n: u64, use_invariants: bool, records: &[LinearInvariant], node_budget: u64) -> SearchStats {
    DemoSolver::new(specs, n, records).solve(targets, use_invariants, node_budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::constraint;
    use crate::oracle::Evaluator;
    use crate::symbol::signature_of;
    use crate::synthesis::{synthesize, SynthOptions};

    #[test]
    fn multi_register_pair_is_exact() {
        let a = constraint("nb_decreasing_terrace").unwrap();
        let b = constraint("sum_width_increasing_terrace").unwrap();
        let solver = DemoSolver::new([&a, &b], 8, &[]);
        let (ea, eb) = (Evaluator::new(&a), Evaluator::new(&b));
        let reachable: alloc::collections::BTreeSet<(u64, u64)> =
            crate::symbol::enumerate_signatures(7).map(|s| (ea.eval(s.symbols()), eb.eval(s.symbols()))).collect();
        for x in 0..=3 {
            for y in 0..=6 {
                let st = solver.solve([x, y], false, u64::MAX);
                assert_eq!(st.solved, reachable.contains(&(x, y)), "({}, {})", x, y);
                if let Some(w) = st.witness {
                    let sig = signature_of(&w);
                    assert_eq!((ea.eval(sig.symbols()), eb.eval(sig.symbols())), (x, y));
                }
            }
        }
    }

    #[test]
    fn trivial_instance() {
        let p = constraint("nb_peak").unwrap();
        let v = constraint("nb_valley").unwrap();
        let st = demo_solve([&p, &v], [0, 0], 1, true, &[], 1000);
        assert!(st.solved);
        assert_eq!(st.backtracks, 0);
    }

    #[test]
    fn pruning_is_sound_and_monotone() {
        let p = constraint("nb_peak").unwrap();
        let v = constraint("nb_valley").unwrap();
        let invs = synthesize(&[p.clone(), v.clone()], SynthOptions::default()).unwrap();
        let n = 9;
        let solver = DemoSolver::new([&p, &v], n, &invs);
        for a in 0..=4 {
            for b in 0..=4 {
                let off = solver.solve([a, b], false, u64::MAX);
                let on = solver.solve([a, b], true, u64::MAX);
                assert_eq!(off.solved, on.solved, "({}, {})", a, b);
                assert!(on.backtracks <= off.backtracks);
                assert!(on.nodes <= off.nodes);
                if let Some(w) = &on.witness {
                    let sig = signature_of(w);
                    assert_eq!(Evaluator::new(&p).eval(sig.symbols()), a);
                    assert_eq!(Evaluator::new(&v).eval(sig.symbols()), b);
                    assert_eq!(w.len() as u64, n);
                }
            }
        }
        // (4, 4) at n = 9 breaks P + V <= n - 2 and is rejected at the root.
        let st = solver.solve([4, 4], true, u64::MAX);
        assert!(!st.solved && st.nodes == 0);
    }
}
