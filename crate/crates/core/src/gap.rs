//! Gap and loss of a series, gap automata and the automata of atomic relations.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::{CatalogError, ConstraintSpec, Feature, UpperBoundFormula};
use crate::dfa::{minimize, Dfa};
use crate::digraph::{bellman_ford, ShortestPaths, WeightedDigraph};
use crate::oracle::Evaluator;
use crate::register::{capped_expansion, mod_expansion, ExpansionError, RegisterAutomaton};
use crate::symbol::{enumerate_signatures, Signature, Symbol};
use crate::transducer::{before_after_found_split, decorate_loss_nb, homogeneity_check, TransducerError};

/// Largest series length covered by the exhaustive check behind `DeskVerified`.
pub const DESK_VERIFY_MAX_N: u64 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Certificate {
    Proved,
    DeskVerified(u64),
}

impl Certificate {
    /// The weaker of two certificates.
    pub fn meet(self, other: Certificate) -> Certificate {
        match (self, other) {
            (Certificate::Proved, x) | (x, Certificate::Proved) => x,
            (Certificate::DeskVerified(a), Certificate::DeskVerified(b)) => Certificate::DeskVerified(a.min(b)),
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Proved => f.write_str("proved"),
            Certificate::DeskVerified(n) => write!(f, "desk-verified to n={}", n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapError {
    Catalog(CatalogError),
    Transducer(TransducerError),
    Separation(String),
    Expansion(ExpansionError),
    /// The deficit can decrease without bound along a cycle.
    Unbounded(String),
    Unsupported(String),
    Verification { delta: u64, witness: Signature },
    Dependent,
}

impl fmt::Display for GapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapError::Catalog(e) => write!(f, "{}", e),
            GapError::Transducer(e) => write!(f, "{}", e),
            GapError::Separation(s) => write!(f, "separation violated: {}", s),
            GapError::Expansion(e) => write!(f, "{}", e),
            GapError::Unbounded(s) => write!(f, "unbounded deficit: {}", s),
            GapError::Unsupported(s) => write!(f, "unsupported register automaton: {}", s),
            GapError::Verification { delta, witness } => {
                write!(f, "gap automaton for delta={} disagrees with the oracle on <{}>", delta, witness)
            }
            GapError::Dependent => f.write_str("dependent relation: use prove_dependent"),
        }
    }
}

impl From<ExpansionError> for GapError {
    fn from(e: ExpansionError) -> Self {
        GapError::Expansion(e)
    }
}

impl From<TransducerError> for GapError {
    fn from(e: TransducerError) -> Self {
        GapError::Transducer(e)
    }
}

impl From<CatalogError> for GapError {
    fn from(e: CatalogError) -> Self {
        GapError::Catalog(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapLossParams {
    pub c: i64,
    pub d: u64,
}

impl GapLossParams {
    pub fn of(spec: &ConstraintSpec) -> Result<GapLossParams, GapError> {
        let (c, d) = homogeneity_check(&spec.separated_transducer())?;
        Ok(GapLossParams { c, d })
    }

    /// Maximum number of occurrences in a series of length `n`.
    pub fn upp(&self, n: u64) -> u64 {
        (n as i64 - self.c).div_euclid(self.d as i64).max(0) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LossInterval {
    pub lo: u64,
    pub hi: u64,
}

impl LossInterval {
    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn disjoint(&self, other: &LossInterval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }
}

pub fn gap_to_loss(p: GapLossParams, delta: u64, sgn: u64, n: u64) -> u64 {
    let (n, d) = (n as i64, p.d as i64);
    let v = delta as i64 * d + (1 - sgn as i64) * (n.min(p.c) - 1) + (n - p.c).max(0) % d;
    v.max(0) as u64
}

pub fn loss_interval(p: GapLossParams, delta: u64, sgn: u64) -> LossInterval {
    let d = p.d as i64;
    let before = 1 - sgn as i64;
    let lo = delta as i64 * d + before * i64::from(delta > 0) * (p.c - 1);
    let hi = d * (delta as i64 + 1) - 1 + before * (p.c - 1);
    LossInterval { lo: lo.max(0) as u64, hi: hi.max(0) as u64 }
}

/// Minimal series length reaching each result value, by breadth-first search.
#[derive(Debug, Clone)]
pub struct LossOracle {
    pub min_len: Vec<Option<u64>>,
}

impl LossOracle {
    pub fn new(ra: &RegisterAutomaton, max_result: u64) -> Result<LossOracle, GapError> {
        let v = capped_expansion(ra, max_result)?;
        let mut min_len = vec![None; max_result as usize + 1];
        let mut depth = vec![u64::MAX; v.num_states()];
        depth[v.initial] = 0;
        let mut queue = VecDeque::from([v.initial]);
        while let Some(x) = queue.pop_front() {
            let (_, vals) = &v.labels[x];
            let exact = vals.iter().zip(&ra.acceptance).all(|(&val, &a)| a == 0 || val <= max_result);
            let r = ra.result_of(vals);
            if exact && r <= max_result && min_len[r as usize].is_none() {
                min_len[r as usize] = Some(depth[x] + 1);
            }
            for &y in &v.trans[x] {
                if depth[y] == u64::MAX {
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        Ok(LossOracle { min_len })
    }

    /// `n` minus the shortest series length with the same result.
    pub fn loss(&self, n: u64, result: u64) -> Option<u64> {
        self.min_len.get(result as usize).copied().flatten().map(|m| n - m)
    }
}

pub fn gap_oracle(spec: &ConstraintSpec, ev: &Evaluator, word: &[Symbol]) -> u64 {
    spec.upp(word.len() as u64 + 1) - ev.eval(word)
}

#[derive(Debug, Clone)]
pub struct GapAutomaton {
    pub delta: u64,
    pub dfa: Dfa,
    pub certificate: Certificate,
    pub raw_states: usize,
    /// Upper bound on `raw_states` guaranteed by the construction, when one is known.
    pub state_bound: Option<usize>,
}

pub fn gap_automaton(spec: &ConstraintSpec, delta: u64) -> Result<GapAutomaton, GapError> {
    Ok(gap_automata(spec, &[delta])?.remove(0))
}

/// Gap automata for several gaps; sum_width automata share one verification sweep.
pub fn gap_automata(spec: &ConstraintSpec, deltas: &[u64]) -> Result<Vec<GapAutomaton>, GapError> {
    match spec.feature {
        Feature::One => deltas.iter().map(|&d| nb_gap_automaton(spec, d)).collect(),
        Feature::Width => {
            let ra = spec.register_automaton();
            let upper = spec.upper.ok_or_else(|| CatalogError::NoBound(spec.name()))?;
            let out: Vec<GapAutomaton> = deltas
                .iter()
                .map(|&d| {
                    let (dfa, raw) = deficit_automaton(&ra, &upper, d)?;
                    Ok(GapAutomaton { delta: d, dfa, certificate: Certificate::DeskVerified(DESK_VERIFY_MAX_N), raw_states: raw, state_bound: None })
                })
                .collect::<Result<_, GapError>>()?;
            let pairs: Vec<(u64, &Dfa)> = out.iter().map(|g| (g.delta, &g.dfa)).collect();
            verify_gap_automata(spec, &pairs, DESK_VERIFY_MAX_N)?;
            Ok(out)
        }
    }
}

fn nb_gap_automaton(spec: &ConstraintSpec, delta: u64) -> Result<GapAutomaton, GapError> {
    let sep = spec.separated_transducer();
    let (c, d) = homogeneity_check(&sep)?;
    let params = GapLossParams { c, d };
    let loss = decorate_loss_nb(&sep)?;
    let split = before_after_found_split(&loss).map_err(GapError::Separation)?;
    let intervals = [loss_interval(params, delta, 0), loss_interval(params, delta, 1)];
    let phi = intervals[0].hi.max(intervals[1].hi);
    let v = capped_expansion(&loss, phi)?;
    let raw = v.raw_dfa(&loss, |q, vals| {
        let total = vals[0] + vals[2];
        total <= phi && intervals[usize::from(split.after[q])].contains(total)
    });
    let bound = loss.num_states() * (phi as usize + 2).pow(3);
    Ok(GapAutomaton { delta, dfa: minimize(&raw), certificate: Certificate::Proved, raw_states: v.num_states(), state_bound: Some(bound) })
}

enum PotentialStep {
    Add(u64),
    Absorb(u64),
    Discard(u64),
}

struct Step {
    main_const: u64,
    pots: Vec<PotentialStep>,
}

fn classify(ra: &RegisterAutomaton) -> Result<(Vec<usize>, Vec<[Step; 3]>), GapError> {
    let main = ra.main();
    let pots: Vec<usize> = (0..ra.num_registers()).filter(|&j| j != main).collect();
    if pots.iter().any(|&j| ra.acceptance[j] != 0) || ra.acceptance[main] != 1 {
        return Err(GapError::Unsupported("result must be the main register".into()));
    }
    let mut steps = Vec::new();
    for row in &ra.trans {
        let mut out = Vec::new();
        for t in row {
            let um = &t.updates[main];
            if um.coeffs[main] != 1 {
                return Err(GapError::Unsupported("main register must keep its value".into()));
            }
            let mut ps = Vec::new();
            for &j in &pots {
                let u = &t.updates[j];
                if u.coeffs.iter().enumerate().any(|(i, &c)| i != j && c != 0) {
                    return Err(GapError::Unsupported("potential register reads another register".into()));
                }
                let absorbed = um.coeffs[j] != 0;
                ps.push(match (u.coeffs[j], absorbed) {
                    (1, false) => PotentialStep::Add(u.constant),
                    (0, true) => PotentialStep::Absorb(u.constant),
                    (0, false) => PotentialStep::Discard(u.constant),
                    _ => return Err(GapError::Unsupported("potential register absorbed without reset".into())),
                });
            }
            out.push(Step { main_const: um.constant, pots: ps });
        }
        steps.push([out.remove(0), out.remove(0), out.remove(0)]);
    }
    Ok((pots, steps))
}

fn step_constants(s: &Step) -> u64 {
    s.main_const
        + s.pots
            .iter()
            .map(|p| match p {
                PotentialStep::Add(c) | PotentialStep::Absorb(c) | PotentialStep::Discard(c) => *c,
            })
            .sum::<u64>()
}

/// Tracks `M = Upp(n) - R - sum(P)`, potentials saturated at a cap, and the length phase
/// of the bound formula; returns the minimized automaton and the raw state count.
fn deficit_automaton(ra: &RegisterAutomaton, upper: &UpperBoundFormula, delta: u64) -> Result<(Dfa, usize), GapError> {
    let (pots, steps) = classify(ra)?;
    let period = upper.d.max(1) as u64;
    let start = upper.from_n + upper.c.unsigned_abs() + period * (upper.k.unsigned_abs() + 1) + 2;
    let upp = |n: u64| upper.value(n).max(0);
    let next_phase = |p: u64| if p + 1 < start + period { p + 1 } else { start };
    let d_upp = |p: u64| upp(p + 1) - upp(p);

    // Largest total decrease of M in the periodic region.
    let nq = ra.num_states();
    let node = |q: usize, ph: u64| q * period as usize + (ph - start) as usize;
    let mut g = WeightedDigraph::new(nq * period as usize + 1);
    let src = nq * period as usize;
    for q in 0..nq {
        for ph in start..start + period {
            g.add_arc(src, node(q, ph), 0, 0);
            for (si, t) in ra.trans[q].iter().enumerate() {
                let w = d_upp(ph) - step_constants(&steps[q][si]) as i64;
                g.add_arc(node(q, ph), node(t.to, next_phase(ph)), w, 0);
            }
        }
    }
    let drop = match bellman_ford(&g, src) {
        ShortestPaths::NegativeCycle(c) => {
            let names: Vec<&str> = c.iter().map(|&a| ra.state_names[g.arcs[a].src / period as usize].as_str()).collect();
            return Err(GapError::Unbounded(format!("cycle through {}", names.join(" "))));
        }
        ShortestPaths::Distances(d) => -d.iter().flatten().min().copied().unwrap_or(0).min(0),
    };
    let clamp = delta as i64 + drop + 1;
    let max_const = steps.iter().flatten().map(step_constants).max().unwrap_or(0);
    let max_init = ra.init_values().into_iter().max().unwrap_or(0);
    let mut cap = (max_init + start * max_const).max(clamp as u64 + max_const);
    loop {
        let (dfa, raw, m_lo) = deficit_bfs(ra, &pots, &steps, cap, clamp, delta, start, &upp, &next_phase);
        let needed = (clamp + max_const as i64 - m_lo.min(0)).max(0) as u64;
        if cap >= needed {
            return Ok((dfa, raw));
        }
        cap = needed;
    }
}

#[allow(clippy::too_many_arguments)]
fn deficit_bfs(
    ra: &RegisterAutomaton,
    pots: &[usize],
    steps: &[[Step; 3]],
    cap: u64,
    clamp: i64,
    delta: u64,
    start: u64,
    upp: &impl Fn(u64) -> i64,
    next_phase: &impl Fn(u64) -> u64,
) -> (Dfa, usize, i64) {
    type Key = (usize, Vec<u64>, i64, u64);
    let sat = cap + 1;
    let init_vals = ra.init_values();
    let p0: Vec<u64> = pots.iter().map(|&j| init_vals[j].min(sat)).collect();
    let m0 = upp(1) - init_vals[ra.main()] as i64 - p0.iter().sum::<u64>() as i64;
    let mut index: BTreeMap<Key, usize> = BTreeMap::new();
    let mut keys: Vec<Option<Key>> = vec![None];
    let mut trans: Vec<[Option<usize>; 3]> = vec![[Some(0); 3]];
    let sink = 0;
    let k0 = (ra.initial, p0, m0, 1u64);
    index.insert(k0.clone(), 1);
    keys.push(Some(k0));
    trans.push([None; 3]);
    let mut queue = VecDeque::from([1usize]);
    let mut m_lo = m0;
    while let Some(id) = queue.pop_front() {
        let (q, ps, m, ph) = keys[id].clone().unwrap();
        let ph2 = next_phase(ph);
        let du = upp(ph + 1) - upp(ph);
        for s in Symbol::ALL {
            let t = &ra.trans[q][s.index()];
            let st = &steps[q][s.index()];
            let mut m2 = m + du - st.main_const as i64;
            let mut p2 = Vec::with_capacity(ps.len());
            let mut dead = false;
            for (p, step) in ps.iter().zip(&st.pots) {
                match *step {
                    PotentialStep::Add(c) => {
                        m2 -= c as i64;
                        p2.push((p + c).min(sat));
                    }
                    PotentialStep::Absorb(c) => {
                        m2 -= c as i64;
                        p2.push(c.min(sat));
                    }
                    PotentialStep::Discard(c) => {
                        if *p == sat {
                            dead = true;
                        }
                        m2 += *p as i64 - c as i64;
                        p2.push(c.min(sat));
                    }
                }
            }
            if ph2 >= start && m2 >= clamp {
                dead = true;
            }
            let target = if dead {
                sink
            } else {
                m_lo = m_lo.min(m2);
                let key = (t.to, p2, m2, ph2);
                match index.get(&key) {
                    Some(&x) => x,
                    None => {
                        let x = keys.len();
                        index.insert(key.clone(), x);
                        keys.push(Some(key));
                        trans.push([None; 3]);
                        queue.push_back(x);
                        x
                    }
                }
            };
            trans[id][s.index()] = Some(target);
        }
    }
    let accepting = keys
        .iter()
        .map(|k| match k {
            None => false,
            Some((q, ps, m, _)) => {
                ra.accepting[*q] && ps.iter().all(|&p| p < sat) && m + ps.iter().sum::<u64>() as i64 == delta as i64
            }
        })
        .collect();
    let raw = Dfa { trans, initial: 1, accepting };
    let n = raw.num_states();
    (minimize(&raw), n, m_lo)
}

/// Exhaustive comparison with the oracle for every series of length at most `max_n`.
pub fn verify_gap_automata(spec: &ConstraintSpec, automata: &[(u64, &Dfa)], max_n: u64) -> Result<(), GapError> {
    let ev = Evaluator::new(spec);
    for len in 0..max_n as usize {
        for sig in enumerate_signatures(len) {
            let gap = gap_oracle(spec, &ev, sig.symbols());
            for &(delta, dfa) in automata {
                if dfa.accepts(sig.symbols()) != (gap == delta) {
                    return Err(GapError::Verification { delta, witness: sig });
                }
            }
        }
    }
    Ok(())
}

/// Elementary relations over `(n, R1, R2)`; `which` is 0 for R1 and 1 for R2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomicRelation {
    LenGeq(u64),
    LenMod { c: u64, d: u64 },
    ResMod { which: usize, c: u64, d: u64 },
    ResGeq { which: usize, d: u64 },
    ResLeq { which: usize, d: u64 },
    ResEq { which: usize, c: u64 },
    /// `R = Upp(n) - c`.
    ResGapEq { which: usize, c: u64 },
    /// `R_j = c * R_k + d`.
    ResLin { j: usize, k: usize, c: u64, d: u64 },
}

impl AtomicRelation {
    pub fn eval(&self, n: u64, r: [u64; 2], upp: [u64; 2]) -> bool {
        match *self {
            AtomicRelation::LenGeq(c) => n >= c,
            AtomicRelation::LenMod { c, d } => n % c == d,
            AtomicRelation::ResMod { which, c, d } => r[which] % c == d,
            AtomicRelation::ResGeq { which, d } => r[which] >= d,
            AtomicRelation::ResLeq { which, d } => r[which] <= d,
            AtomicRelation::ResEq { which, c } => r[which] == c,
            AtomicRelation::ResGapEq { which, c } => r[which] + c == upp[which],
            AtomicRelation::ResLin { j, k, c, d } => r[j] == c * r[k] + d,
        }
    }

    pub fn is_dependent(&self) -> bool {
        matches!(self, AtomicRelation::ResLin { .. })
    }

    /// Result registers the relation reads.
    pub fn registers(&self) -> Vec<usize> {
        match *self {
            AtomicRelation::LenGeq(_) | AtomicRelation::LenMod { .. } => Vec::new(),
            AtomicRelation::ResMod { which, .. }
            | AtomicRelation::ResGeq { which, .. }
            | AtomicRelation::ResLeq { which, .. }
            | AtomicRelation::ResEq { which, .. }
            | AtomicRelation::ResGapEq { which, .. } => vec![which],
            AtomicRelation::ResLin { j, k, .. } => vec![j, k],
        }
    }
}

impl fmt::Display for AtomicRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AtomicRelation::LenGeq(c) => write!(f, "n >= {}", c),
            AtomicRelation::LenMod { c, d } => write!(f, "n mod {} = {}", c, d),
            AtomicRelation::ResMod { which, c, d } => write!(f, "R{} mod {} = {}", which + 1, c, d),
            AtomicRelation::ResGeq { which, d } => write!(f, "R{} >= {}", which + 1, d),
            AtomicRelation::ResLeq { which, d } => write!(f, "R{} <= {}", which + 1, d),
            AtomicRelation::ResEq { which, c } => write!(f, "R{} = {}", which + 1, c),
            AtomicRelation::ResGapEq { which, c: 0 } => write!(f, "R{} = Upp{}", which + 1, which + 1),
            AtomicRelation::ResGapEq { which, c } => write!(f, "R{} = Upp{} - {}", which + 1, which + 1, c),
            AtomicRelation::ResLin { j, k, c: 1, d: 0 } => write!(f, "R{} = R{}", j + 1, k + 1),
            AtomicRelation::ResLin { j, k, c, d: 0 } => write!(f, "R{} = {}*R{}", j + 1, c, k + 1),
            AtomicRelation::ResLin { j, k, c: 1, d } => write!(f, "R{} = R{} + {}", j + 1, k + 1, d),
            AtomicRelation::ResLin { j, k, c, d } => write!(f, "R{} = {}*R{} + {}", j + 1, c, k + 1, d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRelationError(pub String);

impl fmt::Display for ParseRelationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse relation `{}`", self.0)
    }
}

fn reg_index(s: &str) -> Option<usize> {
    match s {
        "R1" => Some(0),
        "R2" => Some(1),
        _ => None,
    }
}

/// `R2`, `2*R2`, `R2 + 1` or `2*R2 + 1` as `(which, c, d)`.
fn parse_affine(s: &str) -> Option<(usize, u64, u64)> {
    let (lin, d) = match s.split_once(" + ") {
        Some((l, d)) => (l, d.parse().ok()?),
        None => (s, 0),
    };
    let (c, r) = match lin.split_once('*') {
        Some((c, r)) => (c.parse().ok()?, r),
        None => (1, lin),
    };
    Some((reg_index(r)?, c, d))
}

impl core::str::FromStr for AtomicRelation {
    type Err = ParseRelationError;

    /// Accepts exactly the `Display` forms.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || ParseRelationError(text.into());
        let t = text.trim();
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| err());
        if let Some(rest) = t.strip_prefix("n >= ") {
            return Ok(AtomicRelation::LenGeq(num(rest)?));
        }
        if let Some(rest) = t.strip_prefix("n mod ") {
            let (c, d) = rest.split_once(" = ").ok_or_else(err)?;
            return Ok(AtomicRelation::LenMod { c: num(c)?, d: num(d)? });
        }
        let (lhs, rest) = t.split_once(' ').ok_or_else(err)?;
        let which = reg_index(lhs).ok_or_else(err)?;
        if let Some(r) = rest.strip_prefix("mod ") {
            let (c, d) = r.split_once(" = ").ok_or_else(err)?;
            return Ok(AtomicRelation::ResMod { which, c: num(c)?, d: num(d)? });
        }
        if let Some(r) = rest.strip_prefix(">= ") {
            return Ok(AtomicRelation::ResGeq { which, d: num(r)? });
        }
        if let Some(r) = rest.strip_prefix("<= ") {
            return Ok(AtomicRelation::ResLeq { which, d: num(r)? });
        }
        let r = rest.strip_prefix("= ").ok_or_else(err)?;
        let upp = if which == 0 { "Upp1" } else { "Upp2" };
        if r == upp {
            return Ok(AtomicRelation::ResGapEq { which, c: 0 });
        }
        if let Some(c) = r.strip_prefix(upp).and_then(|x| x.strip_prefix(" - ")) {
            return Ok(AtomicRelation::ResGapEq { which, c: num(c)? });
        }
        if let Ok(c) = r.parse::<u64>() {
            return Ok(AtomicRelation::ResEq { which, c });
        }
        let (k, c, d) = parse_affine(r).ok_or_else(err)?;
        if k == which {
            return Err(err());
        }
        Ok(AtomicRelation::ResLin { j: which, k, c, d })
    }
}

/// `n >= min_n` and `n mod modulus = residue` (modulus 1 imposes nothing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LengthCondition {
    pub min_n: u64,
    pub modulus: u64,
    pub residue: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl LengthCondition {
    pub const ALL: LengthCondition = LengthCondition { min_n: 1, modulus: 1, residue: 0 };

    pub fn geq(c: u64) -> LengthCondition {
        LengthCondition { min_n: c.max(1), ..Self::ALL }
    }

    pub fn modulo(c: u64, d: u64) -> LengthCondition {
        LengthCondition { min_n: 1, modulus: c.max(1), residue: d % c.max(1) }
    }

    /// Conjunction; `None` when the residue classes are incompatible.
    pub fn and(&self, other: &LengthCondition) -> Option<LengthCondition> {
        let l = self.modulus / gcd(self.modulus, other.modulus) * other.modulus;
        let residue = (0..l).find(|r| r % self.modulus == self.residue && r % other.modulus == other.residue)?;
        Some(LengthCondition { min_n: self.min_n.max(other.min_n), modulus: l, residue })
    }

    pub fn admits(&self, n: u64) -> bool {
        n >= self.min_n && n % self.modulus == self.residue
    }

    /// Minimal difference between consecutive admissible lengths.
    pub fn smallest_gap(&self) -> u64 {
        self.modulus
    }

    /// Automaton over signatures: word length is `n - 1`.
    pub fn dfa(&self) -> Dfa {
        Dfa::length_automaton(self.min_n as usize, self.modulus as usize, |w| self.admits(w as u64 + 1))
    }
}

impl fmt::Display for LengthCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ge = self.min_n > 1;
        let md = self.modulus > 1;
        match (ge, md) {
            (false, false) => f.write_str("all"),
            (true, false) => write!(f, "n >= {}", self.min_n),
            (false, true) => write!(f, "n mod {} = {}", self.modulus, self.residue),
            (true, true) => write!(f, "n >= {} and n mod {} = {}", self.min_n, self.modulus, self.residue),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelationAutomaton {
    pub dfa: Dfa,
    pub certificate: Certificate,
}

/// A constraint pair with its register automata and any gap automata built so far.
#[derive(Debug, Clone)]
pub struct RelationContext {
    pub specs: [ConstraintSpec; 2],
    ras: [RegisterAutomaton; 2],
    gaps: BTreeMap<(usize, u64), GapAutomaton>,
}

impl RelationContext {
    pub fn new(pair: [&ConstraintSpec; 2]) -> RelationContext {
        RelationContext {
            specs: [pair[0].clone(), pair[1].clone()],
            ras: [pair[0].register_automaton(), pair[1].register_automaton()],
            gaps: BTreeMap::new(),
        }
    }

    pub fn register_automaton(&self, which: usize) -> &RegisterAutomaton {
        &self.ras[which]
    }

    /// Builds and caches the gap automata the relations need.
    pub fn prepare(&mut self, rels: &[AtomicRelation]) -> Result<(), GapError> {
        for which in 0..2 {
            let mut deltas: Vec<u64> = rels
                .iter()
                .filter_map(|r| match *r {
                    AtomicRelation::ResGapEq { which: w, c } if w == which && !self.gaps.contains_key(&(which, c)) => Some(c),
                    _ => None,
                })
                .collect();
            deltas.sort_unstable();
            deltas.dedup();
            if deltas.is_empty() {
                continue;
            }
            for g in gap_automata(&self.specs[which], &deltas)? {
                self.gaps.insert((which, g.delta), g);
            }
        }
        Ok(())
    }

    pub fn automaton(&self, rel: &AtomicRelation) -> Result<RelationAutomaton, GapError> {
        let proved = |dfa: Dfa| Ok(RelationAutomaton { dfa, certificate: Certificate::Proved });
        match *rel {
            AtomicRelation::LenGeq(c) => proved(LengthCondition::geq(c).dfa()),
            AtomicRelation::LenMod { c, d } => proved(LengthCondition::modulo(c, d).dfa()),
            AtomicRelation::ResMod { which, c, d } => {
                let ra = &self.ras[which];
                let main = ra.main();
                proved(mod_expansion(ra, c)?.dfa(ra, |_, v| v[main] % c == d))
            }
            AtomicRelation::ResGeq { which, d } => self.threshold(which, d, |r| r >= d),
            AtomicRelation::ResLeq { which, d } => self.threshold(which, d, |r| r <= d),
            AtomicRelation::ResEq { which, c } => self.threshold(which, c, |r| r == c),
            AtomicRelation::ResGapEq { which, c } => {
                let g = match self.gaps.get(&(which, c)) {
                    Some(g) => g.clone(),
                    None => gap_automaton(&self.specs[which], c)?,
                };
                Ok(RelationAutomaton { dfa: g.dfa, certificate: g.certificate })
            }
            AtomicRelation::ResLin { .. } => Err(GapError::Dependent),
        }
    }

    fn threshold(&self, which: usize, cap: u64, pred: impl Fn(u64) -> bool) -> Result<RelationAutomaton, GapError> {
        let ra = &self.ras[which];
        let dfa = capped_expansion(ra, cap)?.dfa(ra, |_, v| pred(ra.result_of(v)));
        Ok(RelationAutomaton { dfa, certificate: Certificate::Proved })
    }
}

pub fn relation_automaton(rel: &AtomicRelation, pair: [&ConstraintSpec; 2]) -> Result<RelationAutomaton, GapError> {
    RelationContext::new(pair).automaton(rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{constraint, constraints};

    fn peak() -> GapLossParams {
        GapLossParams { c: 1, d: 2 }
    }

    #[test]
    fn loss_formula_examples() {
        assert_eq!(gap_to_loss(peak(), 1, 1, 8), 3);
        assert_eq!(gap_to_loss(peak(), 4, 0, 9), 8);
        assert_eq!(gap_to_loss(peak(), 0, 1, 7), 0);
        for delta in 0..6 {
            for s in 0..2 {
                assert_eq!(loss_interval(peak(), delta, s), LossInterval { lo: 2 * delta, hi: 2 * delta + 1 });
            }
        }
    }

    #[test]
    fn params_match_catalog_bounds() {
        for c in constraints().into_iter().filter(|c| c.feature == Feature::One) {
            let p = GapLossParams::of(&c).unwrap();
            for n in 1..=14 {
                assert_eq!(p.upp(n), c.upp(n), "{} n={}", c.name(), n);
            }
        }
    }

    #[test]
    fn loss_identity_and_intervals() {
        for c in constraints().into_iter().filter(|c| c.feature == Feature::One) {
            let p = GapLossParams::of(&c).unwrap();
            let ra = c.register_automaton();
            let oracle = LossOracle::new(&ra, 8).unwrap();
            let ev = Evaluator::new(&c);
            for len in 0..=8 {
                for sig in enumerate_signatures(len) {
                    let n = len as u64 + 1;
                    let r = ev.eval(sig.symbols());
                    let gap = c.upp(n) - r;
                    let sgn = u64::from(r > 0);
                    let loss = oracle.loss(n, r).unwrap();
                    assert_eq!(loss, gap_to_loss(p, gap, sgn, n), "{} <{}>", c.name(), sig);
                    assert!(loss_interval(p, gap, sgn).contains(loss), "{} <{}>", c.name(), sig);
                }
            }
            for s in 0..2 {
                for a in 0..=5 {
                    for b in a + 1..=5 {
                        assert!(loss_interval(p, a, s).disjoint(&loss_interval(p, b, s)));
                    }
                }
            }
        }
    }

    #[test]
    fn peak_gap_zero_at_lengths_five_and_six() {
        let spec = constraint("nb_peak").unwrap();
        let g = gap_automaton(&spec, 0).unwrap();
        assert_eq!(g.certificate, Certificate::Proved);
        assert!(g.raw_states <= g.state_bound.unwrap());
        let ev = Evaluator::new(&spec);
        for len in [4, 5] {
            for sig in enumerate_signatures(len) {
                assert_eq!(g.dfa.accepts(sig.symbols()), ev.eval(sig.symbols()) == 2, "<{}>", sig);
            }
        }
    }

    #[test]
    fn nb_gap_automata_match_oracle() {
        for c in constraints().into_iter().filter(|c| c.feature == Feature::One) {
            let gs = gap_automata(&c, &[0, 1, 2]).unwrap();
            let pairs: Vec<(u64, &Dfa)> = gs.iter().map(|g| (g.delta, &g.dfa)).collect();
            assert_eq!(verify_gap_automata(&c, &pairs, 10), Ok(()), "{}", c.name());
        }
    }

    #[test]
    fn sum_width_gap_automata_are_desk_verified() {
        for spec in constraints().into_iter().filter(|c| c.feature == Feature::Width) {
            let gs = gap_automata(&spec, &[0, 1, 2, 3, 4, 5]).unwrap();
            assert!(gs.iter().all(|g| g.certificate == Certificate::DeskVerified(DESK_VERIFY_MAX_N)));
        }
    }

    #[test]
    fn relation_automata() {
        let p = constraint("nb_peak").unwrap();
        let v = constraint("nb_valley").unwrap();
        let geq = relation_automaton(&AtomicRelation::LenGeq(5), [&p, &v]).unwrap();
        assert!(!geq.dfa.accepts(&Signature::parse("<=>").unwrap().0));
        assert!(geq.dfa.accepts(&Signature::parse("<=><").unwrap().0));
        let one = relation_automaton(&AtomicRelation::ResEq { which: 0, c: 1 }, [&p, &v]).unwrap();
        let ev = Evaluator::new(&p);
        for len in 0..=7 {
            for sig in enumerate_signatures(len) {
                assert_eq!(one.dfa.accepts(sig.symbols()), ev.eval(sig.symbols()) == 1);
            }
        }
        let lin = AtomicRelation::ResLin { j: 0, k: 1, c: 1, d: 0 };
        assert_eq!(relation_automaton(&lin, [&p, &v]).unwrap_err(), GapError::Dependent);
        assert_eq!(lin.to_string(), "R1 = R2");
        assert_eq!(AtomicRelation::ResGapEq { which: 1, c: 1 }.to_string(), "R2 = Upp2 - 1");
        assert!("R3 = 1".parse::<AtomicRelation>().is_err());
        assert!("R1 = R1".parse::<AtomicRelation>().is_err());
    }

    #[test]
    fn length_conditions() {
        let odd = LengthCondition::modulo(2, 1);
        let c = odd.and(&LengthCondition::geq(5)).unwrap();
        assert_eq!(c.to_string(), "n >= 5 and n mod 2 = 1");
        assert_eq!(c.smallest_gap(), 2);
        let d = c.dfa();
        for w in 0..20usize {
            assert_eq!(d.accepts(&vec![Symbol::Eq; w]), c.admits(w as u64 + 1));
        }
        assert_eq!(odd.and(&LengthCondition::modulo(2, 0)), None);
        assert_eq!(LengthCondition::ALL.to_string(), "all");
    }

    #[test]
    fn paper_loss_example() {
        use crate::symbol::{signature_of, TimeSeries};
        let spec = constraint("nb_peak").unwrap();
        let sig = signature_of(&TimeSeries(vec![1, 1, 2, 1, 2, 1, 1, 2, 1, 2]));
        let oracle = LossOracle::new(&spec.register_automaton(), 10).unwrap();
        let r = Evaluator::new(&spec).eval(sig.symbols());
        assert_eq!(oracle.loss(10, r), Some(3));
    }

    use proptest::prelude::*;

    fn relation() -> impl Strategy<Value = AtomicRelation> {
        let w = 0usize..2;
        prop_oneof![
            (0u64..30).prop_map(AtomicRelation::LenGeq),
            (2u64..5, 0u64..5).prop_map(|(c, d)| AtomicRelation::LenMod { c, d }),
            (w.clone(), 2u64..5, 0u64..5).prop_map(|(which, c, d)| AtomicRelation::ResMod { which, c, d }),
            (w.clone(), 0u64..9).prop_map(|(which, d)| AtomicRelation::ResGeq { which, d }),
            (w.clone(), 0u64..9).prop_map(|(which, d)| AtomicRelation::ResLeq { which, d }),
            (w.clone(), 0u64..9).prop_map(|(which, c)| AtomicRelation::ResEq { which, c }),
            (w.clone(), 0u64..9).prop_map(|(which, c)| AtomicRelation::ResGapEq { which, c }),
            (w, 0u64..4, 0u64..4).prop_map(|(j, c, d)| AtomicRelation::ResLin { j, k: 1 - j, c, d }),
        ]
    }

    proptest! {
        #[test]
        fn relation_text_roundtrip(r in relation()) {
            prop_assert_eq!(r.to_string().parse::<AtomicRelation>(), Ok(r));
        }

        #[test]
        fn loss_intervals_disjoint(c in -2i64..5, d in 1u64..5, a in 0u64..6, b in 0u64..6, s in 0u64..2) {
            let p = GapLossParams { c, d };
            let (x, y) = (loss_interval(p, a, s), loss_interval(p, b, s));
            prop_assert!(x.lo <= x.hi);
            if a != b && c >= 1 {
                prop_assert!(x.disjoint(&y));
            }
        }
    }
}
