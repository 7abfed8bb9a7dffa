//! Mining non-linear invariants: datasets, hypotheses, consistency, proofs, dominance.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::ConstraintSpec;
use crate::dfa::{intersect_all, language_class, minimize, pumped_witness, Dfa, LanguageClass};
use crate::gap::{AtomicRelation, Certificate, GapError, ParseRelationError, RelationAutomaton, RelationContext};
use crate::hull::{graham_hull, lattice_points, Point};
use crate::oracle::Evaluator;
use crate::symbol::{enumerate_signatures, Signature};
use crate::synthesis::{prove_dependent, DependentOutcome};

pub type Pair<'a> = [&'a ConstraintSpec; 2];

pub fn upps(pair: Pair, n: u64) -> [u64; 2] {
    [pair[0].upp(n), pair[1].upp(n)]
}

/// Every `(R1, R2)` reached by some series of length `n`.
pub fn feasible_set(pair: Pair, n: u64) -> BTreeSet<(u64, u64)> {
    let ev = [Evaluator::new(pair[0]), Evaluator::new(pair[1])];
    enumerate_signatures(n.saturating_sub(1) as usize).map(|s| (ev[0].eval(s.symbols()), ev[1].eval(s.symbols()))).collect()
}

pub fn feasible_sets(pair: Pair, n_lo: u64, n_hi: u64) -> BTreeMap<u64, BTreeSet<(u64, u64)>> {
    (n_lo..=n_hi).map(|n| (n, feasible_set(pair, n))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSlice {
    pub n: u64,
    pub upp: [u64; 2],
    pub feasible: Vec<(u64, u64)>,
    pub hull: Vec<Point>,
    pub infeasible: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub pair: [String; 2],
    pub slices: Vec<DataSlice>,
}

pub fn dataset_from(pair: Pair, feasible: &BTreeMap<u64, BTreeSet<(u64, u64)>>) -> Dataset {
    let slices = feasible
        .iter()
        .map(|(&n, f)| {
            let pts: Vec<Point> = f.iter().map(|&(a, b)| (a as i64, b as i64)).collect();
            let hull = graham_hull(&pts);
            let infeasible = lattice_points(&hull)
                .into_iter()
                .map(|(x, y)| (x as u64, y as u64))
                .filter(|p| !f.contains(p))
                .collect();
            DataSlice { n, upp: upps(pair, n), feasible: f.iter().copied().collect(), hull, infeasible }
        })
        .collect();
    Dataset { pair: [pair[0].name(), pair[1].name()], slices }
}

pub fn generate_dataset(pair: Pair, n_lo: u64, n_hi: u64) -> Dataset {
    dataset_from(pair, &feasible_sets(pair, n_lo, n_hi))
}

/// A conjunction of atomic relations, kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BooleanFunction {
    pub conjuncts: Vec<AtomicRelation>,
}

impl BooleanFunction {
    pub fn new(mut conjuncts: Vec<AtomicRelation>) -> BooleanFunction {
        conjuncts.sort_unstable();
        conjuncts.dedup();
        BooleanFunction { conjuncts }
    }

    pub fn len(&self) -> usize {
        self.conjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn eval(&self, n: u64, r: [u64; 2], upp: [u64; 2]) -> bool {
        self.conjuncts.iter().all(|a| a.eval(n, r, upp))
    }

    pub fn dependent(&self) -> Option<AtomicRelation> {
        self.conjuncts.iter().copied().find(AtomicRelation::is_dependent)
    }

    /// Every conjunct of `self` occurs in `other`.
    pub fn is_subset_of(&self, other: &BooleanFunction) -> bool {
        self.conjuncts.iter().all(|a| other.conjuncts.contains(a))
    }

    /// Sort key: size first, then the conjuncts.
    pub fn order_key(&self) -> (usize, &[AtomicRelation]) {
        (self.len(), &self.conjuncts)
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" and ")?;
            }
            write!(f, "{}", a)?;
        }
        Ok(())
    }
}

impl core::str::FromStr for BooleanFunction {
    type Err = ParseRelationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let atoms = s.split(" and ").map(str::parse).collect::<Result<Vec<AtomicRelation>, _>>()?;
        Ok(BooleanFunction::new(atoms))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisBounds {
    pub max_const: u64,
    pub moduli: Vec<u64>,
    pub max_conjuncts: usize,
    pub lin_c: Vec<u64>,
    pub lin_d: Vec<u64>,
}

impl Default for HypothesisBounds {
    fn default() -> Self {
        HypothesisBounds { max_const: 5, moduli: vec![2, 3], max_conjuncts: 3, lin_c: vec![1, 2], lin_d: vec![0, 1] }
    }
}

pub fn atoms(b: &HypothesisBounds) -> Vec<AtomicRelation> {
    let mut out = Vec::new();
    for &c in &b.moduli {
        for d in 0..c {
            out.push(AtomicRelation::LenMod { c, d });
        }
    }
    for which in 0..2 {
        for &c in &b.moduli {
            for d in 0..c {
                out.push(AtomicRelation::ResMod { which, c, d });
            }
        }
        for d in 0..=b.max_const {
            out.push(AtomicRelation::ResGeq { which, d });
            out.push(AtomicRelation::ResLeq { which, d });
            out.push(AtomicRelation::ResEq { which, c: d });
            out.push(AtomicRelation::ResGapEq { which, c: d });
        }
    }
    for (j, k) in [(0, 1), (1, 0)] {
        for &c in &b.lin_c {
            for &d in &b.lin_d {
                out.push(AtomicRelation::ResLin { j, k, c, d });
            }
        }
    }
    out
}

/// Conjunctions of 1 to `max_conjuncts` distinct atoms with at most one dependent atom.
pub fn enumerate_hypotheses(b: &HypothesisBounds) -> Vec<BooleanFunction> {
    let a = atoms(b);
    let mut out = Vec::new();
    let mut idx: Vec<usize> = Vec::new();
    fn rec(a: &[AtomicRelation], start: usize, max: usize, idx: &mut Vec<usize>, out: &mut Vec<BooleanFunction>) {
        for i in start..a.len() {
            idx.push(i);
            if idx.iter().filter(|&&j| a[j].is_dependent()).count() <= 1 {
                out.push(BooleanFunction::new(idx.iter().map(|&j| a[j]).collect()));
                if idx.len() < max {
                    rec(a, i + 1, max, idx, out);
                }
            }
            idx.pop();
        }
    }
    rec(&a, 0, b.max_conjuncts, &mut idx, &mut out);
    out.sort_by(|x, y| x.order_key().cmp(&y.order_key()));
    out
}

/// Keep functions false on every feasible point and true on at least one infeasible point.
pub fn is_consistent(f: &BooleanFunction, ds: &Dataset) -> bool {
    let mut hits_negative = false;
    for s in &ds.slices {
        if s.feasible.iter().any(|&(a, b)| f.eval(s.n, [a, b], s.upp)) {
            return false;
        }
        hits_negative = hits_negative || s.infeasible.iter().any(|&(a, b)| f.eval(s.n, [a, b], s.upp));
    }
    hits_negative
}

pub fn filter_consistent(candidates: &[BooleanFunction], ds: &Dataset) -> Vec<BooleanFunction> {
    candidates.iter().filter(|f| is_consistent(f, ds)).cloned().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofStatus {
    ProvedUniversal,
    /// The function is false for every series with `n >= n_min`.
    ProvedWithGuard(u64),
    DeskVerified { max_n: u64, n_min: u64 },
    Refuted(Signature),
    Unknown(String),
}

impl ProofStatus {
    pub fn is_proved(&self) -> bool {
        !matches!(self, ProofStatus::Refuted(_) | ProofStatus::Unknown(_))
    }

    /// Smallest length from which the negated function is claimed.
    pub fn n_min(&self) -> Option<u64> {
        match *self {
            ProofStatus::ProvedUniversal => Some(1),
            ProofStatus::ProvedWithGuard(n) => Some(n),
            ProofStatus::DeskVerified { n_min, .. } => Some(n_min),
            _ => None,
        }
    }
}

impl fmt::Display for ProofStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStatus::ProvedUniversal => f.write_str("proved"),
            ProofStatus::ProvedWithGuard(n) => write!(f, "proved for n >= {}", n),
            ProofStatus::DeskVerified { max_n, n_min: 1 } => write!(f, "desk-verified to n={}", max_n),
            ProofStatus::DeskVerified { max_n, n_min } => write!(f, "desk-verified to n={} for n >= {}", max_n, n_min),
            ProofStatus::Refuted(w) => write!(f, "refuted by <{}>", w),
            ProofStatus::Unknown(s) => write!(f, "unknown: {}", s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonLinearInvariant {
    pub function: BooleanFunction,
    pub status: ProofStatus,
    /// How the status was obtained.
    pub evidence: String,
    pub pair: [String; 2],
}

/// Relation automata for every atom in use, built once per pair.
#[derive(Debug, Clone)]
pub struct ProofContext {
    pub ctx: RelationContext,
    cache: BTreeMap<AtomicRelation, RelationAutomaton>,
}

impl ProofContext {
    pub fn new(pair: Pair, atoms: &[AtomicRelation]) -> Result<ProofContext, GapError> {
        let mut ctx = RelationContext::new(pair);
        ctx.prepare(atoms)?;
        let mut cache = BTreeMap::new();
        for a in atoms.iter().filter(|a| !a.is_dependent()) {
            cache.insert(*a, ctx.automaton(a)?);
        }
        Ok(ProofContext { ctx, cache })
    }

    pub fn automaton(&self, a: &AtomicRelation) -> Result<RelationAutomaton, GapError> {
        match self.cache.get(a) {
            Some(r) => Ok(r.clone()),
            None => self.ctx.automaton(a),
        }
    }

    fn pair(&self) -> Pair<'_> {
        [&self.ctx.specs[0], &self.ctx.specs[1]]
    }

    /// Whether `f` holds on the series of signature `word`, by the oracle.
    pub fn holds_on(&self, f: &BooleanFunction, word: &Signature) -> bool {
        let p = self.pair();
        let r = [Evaluator::new(p[0]).eval(word.symbols()), Evaluator::new(p[1]).eval(word.symbols())];
        let n = word.len() as u64 + 1;
        f.eval(n, r, upps(p, n))
    }

    pub fn prove(&self, f: &BooleanFunction) -> NonLinearInvariant {
        let (status, evidence) = match self.prove_inner(f) {
            Ok(x) => x,
            Err(e) => (ProofStatus::Unknown(e.to_string()), String::new()),
        };
        NonLinearInvariant { function: f.clone(), status, evidence, pair: [self.ctx.specs[0].name(), self.ctx.specs[1].name()] }
    }

    fn prove_inner(&self, f: &BooleanFunction) -> Result<(ProofStatus, String), GapError> {
        let mut cert = Certificate::Proved;
        let mut dfas = Vec::new();
        for a in f.conjuncts.iter().filter(|a| !a.is_dependent()) {
            let r = self.automaton(a)?;
            cert = cert.meet(r.certificate);
            dfas.push(r.dfa);
        }
        let inter = if dfas.is_empty() { Dfa::universal() } else { minimize(&intersect_all(&dfas)) };
        let cap = |status: ProofStatus| match (cert, status) {
            (Certificate::DeskVerified(max_n), s) if s.is_proved() => ProofStatus::DeskVerified { max_n, n_min: s.n_min().unwrap() },
            (_, s) => s,
        };
        if let Some(AtomicRelation::ResLin { j, k: _, c, d }) = f.dependent() {
            return Ok(match prove_dependent(self.pair(), j, c, d, &inter) {
                DependentOutcome::ProvedInfeasible(certs) => {
                    // The linear certificates cover n >= 2; the empty signature is checked directly.
                    let s = if self.holds_on(f, &Signature::empty()) { ProofStatus::ProvedWithGuard(2) } else { ProofStatus::ProvedUniversal };
                    (cap(s), certs.join("; "))
                }
                DependentOutcome::Unknown(why) => match self.search_witness(f, 10) {
                    Some(w) => (ProofStatus::Refuted(w), "oracle search".into()),
                    None => (ProofStatus::Unknown(why), String::new()),
                },
            });
        }
        Ok(match language_class(&inter) {
            LanguageClass::Empty => (cap(ProofStatus::ProvedUniversal), "intersection empty".into()),
            LanguageClass::Finite { longest_word_len } => (
                cap(ProofStatus::ProvedWithGuard(longest_word_len as u64 + 2)),
                format!("intersection finite, longest signature {}", longest_word_len),
            ),
            LanguageClass::Infinite => {
                let (_, pumped) = pumped_witness(&inter).expect("infinite language has a cycle");
                let w = Signature(pumped);
                if self.holds_on(f, &w) {
                    (ProofStatus::Refuted(w), "intersection infinite".into())
                } else {
                    (ProofStatus::Unknown(format!("automaton witness <{}> rejected by the oracle", w)), String::new())
                }
            }
        })
    }

    fn search_witness(&self, f: &BooleanFunction, max_n: u64) -> Option<Signature> {
        let p = self.pair();
        let ev = [Evaluator::new(p[0]), Evaluator::new(p[1])];
        for len in 0..max_n as usize {
            for s in enumerate_signatures(len) {
                let n = len as u64 + 1;
                if f.eval(n, [ev[0].eval(s.symbols()), ev[1].eval(s.symbols())], upps(p, n)) {
                    return Some(s);
                }
            }
        }
        None
    }
}

/// Proves candidates by increasing size, skipping any candidate that contains an
/// already proved function; `batch` proves one size class.
pub fn prove_levelwise(
    candidates: &[BooleanFunction],
    mut batch: impl FnMut(&[BooleanFunction]) -> Vec<NonLinearInvariant>,
) -> (Vec<NonLinearInvariant>, usize) {
    let max = candidates.iter().map(BooleanFunction::len).max().unwrap_or(0);
    let mut out: Vec<NonLinearInvariant> = Vec::new();
    let mut skipped = 0;
    for size in 1..=max {
        let level: Vec<BooleanFunction> = candidates
            .iter()
            .filter(|f| f.len() == size)
            .filter(|f| {
                let covered = out.iter().any(|p| p.status.is_proved() && p.function.is_subset_of(f));
                skipped += usize::from(covered);
                !covered
            })
            .cloned()
            .collect();
        out.extend(batch(&level));
    }
    (out, skipped)
}

/// Keeps proved functions no other proved function is a proper conjunct-subset of,
/// in size-then-lexicographic order.
pub fn dominance_filter(proved: &[NonLinearInvariant]) -> Vec<NonLinearInvariant> {
    let mut ps: Vec<&NonLinearInvariant> = proved.iter().filter(|p| p.status.is_proved()).collect();
    ps.sort_by(|a, b| a.function.order_key().cmp(&b.function.order_key()));
    ps.dedup_by(|a, b| a.function == b.function);
    ps.iter()
        .filter(|f| !ps.iter().any(|g| g.function.len() < f.function.len() && g.function.is_subset_of(&f.function)))
        .map(|f| (*f).clone())
        .collect()
}

/// Whether `f` implies `g` on every `(n, R1, R2)` with `n` in the range and each `R` within its bound.
pub fn implies_on_box(pair: Pair, f: &BooleanFunction, g: &BooleanFunction, n_lo: u64, n_hi: u64) -> bool {
    (n_lo..=n_hi).all(|n| {
        let u = upps(pair, n);
        (0..=u[0]).all(|a| (0..=u[1]).all(|b| !f.eval(n, [a, b], u) || g.eval(n, [a, b], u)))
    })
}

/// `(n, R1, R2)` points where the invariant is violated, i.e. the function holds on a
/// feasible point at a length it claims.
pub fn violations(inv: &NonLinearInvariant, pair: Pair, feasible: &BTreeMap<u64, BTreeSet<(u64, u64)>>) -> Vec<(u64, u64, u64)> {
    let n_min = inv.status.n_min().unwrap_or(u64::MAX);
    let mut out = Vec::new();
    for (&n, f) in feasible.range(n_min..) {
        let u = upps(pair, n);
        for &(a, b) in f {
            if inv.function.eval(n, [a, b], u) {
                out.push((n, a, b));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct MiningReport {
    pub dataset: Dataset,
    pub hypotheses: usize,
    pub consistent: usize,
    pub skipped: usize,
    pub proved: Vec<NonLinearInvariant>,
    pub final_set: Vec<NonLinearInvariant>,
}

/// The whole pipeline, sequentially.
pub fn mine(pair: Pair, n_lo: u64, n_hi: u64, bounds: &HypothesisBounds) -> Result<MiningReport, GapError> {
    let dataset = generate_dataset(pair, n_lo, n_hi);
    let hyps = enumerate_hypotheses(bounds);
    let consistent = filter_consistent(&hyps, &dataset);
    let used: BTreeSet<AtomicRelation> = consistent.iter().flat_map(|f| f.conjuncts.iter().copied()).collect();
    let pc = ProofContext::new(pair, &used.into_iter().collect::<Vec<_>>())?;
    let (all, skipped) = prove_levelwise(&consistent, |level| level.iter().map(|f| pc.prove(f)).collect());
    let proved: Vec<NonLinearInvariant> = all.into_iter().filter(|p| p.status.is_proved()).collect();
    let final_set = dominance_filter(&proved);
    Ok(MiningReport { dataset, hypotheses: hyps.len(), consistent: consistent.len(), skipped, proved, final_set })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::constraint;

    fn running() -> [ConstraintSpec; 2] {
        [constraint("sum_width_decreasing_sequence").unwrap(), constraint("sum_width_zigzag").unwrap()]
    }

    fn f(atoms: &[AtomicRelation]) -> BooleanFunction {
        BooleanFunction::new(atoms.to_vec())
    }

    use AtomicRelation::*;

    #[test]
    fn running_pair_dataset_at_nine() {
        let [a, b] = running();
        let ds = generate_dataset([&a, &b], 9, 9);
        let s = &ds.slices[0];
        assert!(s.feasible.contains(&(9, 6)));
        assert!(s.infeasible.contains(&(9, 5)));
        assert_eq!(s.hull, [(0, 0), (9, 0), (9, 6), (8, 7), (6, 6)]);
        assert_eq!(s.infeasible.len(), 16);
    }

    #[test]
    fn peak_valley_feasible_point() {
        use crate::symbol::{signature_of, TimeSeries};
        let p = constraint("nb_peak").unwrap();
        let v = constraint("nb_valley").unwrap();
        let f = feasible_set([&p, &v], 11);
        assert!(f.contains(&(4, 3)));
        let w = signature_of(&TimeSeries(vec![0, 2, 0, 2, 0, 2, 0, 2, 0, 0, 0]));
        assert_eq!((Evaluator::new(&p).eval(w.symbols()), Evaluator::new(&v).eval(w.symbols())), (4, 3));
    }

    #[test]
    fn hypotheses_contain_paper_functions() {
        let h = enumerate_hypotheses(&HypothesisBounds::default());
        assert!(h.iter().all(|x| !x.is_empty() && x.len() <= 3));
        assert!(h.contains(&f(&[ResEq { which: 0, c: 1 }])));
        assert!(h.contains(&f(&[LenMod { c: 2, d: 0 }, ResGapEq { which: 0, c: 1 }, ResGapEq { which: 1, c: 0 }])));
        assert!(h.contains(&f(&[ResMod { which: 0, c: 2, d: 1 }, ResLin { j: 0, k: 1, c: 1, d: 0 }])));
        assert_eq!(atoms(&HypothesisBounds::default()).len(), 71);
    }

    #[test]
    fn consistency_examples() {
        let [a, b] = running();
        let ds = generate_dataset([&a, &b], 7, 12);
        let eq = ResLin { j: 0, k: 1, c: 1, d: 0 };
        assert!(is_consistent(&f(&[eq, ResMod { which: 0, c: 2, d: 1 }]), &ds));
        assert!(!is_consistent(&f(&[ResEq { which: 0, c: 13 }]), &ds));
        assert!(!is_consistent(&f(&[eq]), &ds));
    }

    #[test]
    fn proofs_on_running_pair() {
        let [a, b] = running();
        let pair = [&a, &b];
        let fs = [
            f(&[ResEq { which: 1, c: 1 }]),
            f(&[LenMod { c: 2, d: 0 }, ResGapEq { which: 0, c: 1 }, ResGapEq { which: 1, c: 0 }]),
            f(&[ResMod { which: 0, c: 2, d: 1 }, ResLin { j: 0, k: 1, c: 1, d: 0 }]),
        ];
        let used: Vec<AtomicRelation> = fs.iter().flat_map(|x| x.conjuncts.clone()).collect();
        let pc = ProofContext::new(pair, &used).unwrap();
        let r: Vec<NonLinearInvariant> = fs.iter().map(|x| pc.prove(x)).collect();
        assert_eq!(r[0].status, ProofStatus::ProvedUniversal);
        assert!(matches!(r[1].status, ProofStatus::DeskVerified { max_n: 13, .. }), "{}", r[1].status);
        assert!(r[2].status.is_proved(), "{}", r[2].status);
        assert!(r[2].evidence.contains("R1 - 1*R2 >= 2"), "{}", r[2].evidence);
        let feas = feasible_sets(pair, 2, 11);
        for inv in &r {
            assert!(violations(inv, pair, &feas).is_empty(), "{}", inv.function);
        }
        let bad = pc.prove(&f(&[ResEq { which: 0, c: 2 }]));
        match bad.status {
            ProofStatus::Refuted(w) => assert!(pc.holds_on(&bad.function, &w)),
            s => panic!("{}", s),
        }
    }

    #[test]
    fn dominance_examples() {
        let mk = |x: BooleanFunction| NonLinearInvariant { function: x, status: ProofStatus::ProvedUniversal, evidence: String::new(), pair: Default::default() };
        let one = mk(f(&[ResEq { which: 0, c: 1 }]));
        let both = mk(f(&[ResEq { which: 0, c: 1 }, ResEq { which: 1, c: 1 }]));
        assert_eq!(dominance_filter(&[both.clone(), one.clone()]), [one.clone()]);
        assert_eq!(dominance_filter(&[both.clone()]), [both]);
        assert_eq!(dominance_filter(&[one.clone(), one.clone()]).len(), 1);
    }

    #[test]
    fn implication_on_box() {
        let [a, b] = running();
        let g = f(&[ResEq { which: 0, c: 1 }]);
        let h = f(&[ResEq { which: 0, c: 1 }, ResGeq { which: 1, d: 0 }]);
        assert!(implies_on_box([&a, &b], &h, &g, 2, 12));
        assert!(!implies_on_box([&a, &b], &f(&[ResLeq { which: 0, d: 1 }]), &g, 2, 12));
    }
}
