//! Linear invariants of a conjunction of constraints via the invariant digraph.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::ConstraintSpec;
use crate::dfa::{intersect, Dfa};
use crate::digraph::{bellman_ford, simple_node_circuits, ShortestPaths, TooManyCircuits, WeightedDigraph};
use crate::register::{delayed_intersection, mod_expansion, product, product_with, restrict, ProductAutomaton, RegisterAutomaton};
use crate::symbol::{Symbol, SIGNATURE_ARITY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// All `2^len` sign vectors, `+` before `-`, first position most significant.
pub fn sign_vectors(len: usize) -> Vec<Vec<Sign>> {
    (0..1usize << len)
        .map(|m| (0..len).map(|i| if m >> (len - 1 - i) & 1 == 0 { Sign::Plus } else { Sign::Minus }).collect())
        .collect()
}

/// Arc weights are linear forms in `(e0, e1, ..., ek)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantDigraph {
    pub node_names: Vec<String>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// Merged arcs `(src, dst, weight form)`.
    pub arcs: Vec<(usize, usize, Vec<i64>)>,
    /// `arc_of[q][symbol]`: merged arc used by the transition.
    pub arc_of: Vec<[usize; 3]>,
    /// Initialisation weight without the constant term `e`.
    pub init_weight: Vec<i64>,
}

fn dot(w: &[i64], e: &[i64]) -> i64 {
    w.iter().zip(e).map(|(a, b)| a * b).sum()
}

pub fn invariant_digraph(p: &ProductAutomaton, signs: &[Sign]) -> InvariantDigraph {
    let ra = &p.ra;
    let k = p.k();
    assert_eq!(signs.len(), k + 1);
    let beta = |consts: &dyn Fn(usize) -> u64, i: usize| -> i64 {
        let f = &p.factors[i];
        match signs[i + 1] {
            Sign::Plus => consts(f.main()) as i64,
            Sign::Minus => f.range().map(consts).sum::<u64>() as i64,
        }
    };
    let mut index: BTreeMap<(usize, usize, Vec<i64>), usize> = BTreeMap::new();
    let mut arcs = Vec::new();
    let mut arc_of = Vec::with_capacity(ra.num_states());
    for (q, row) in ra.trans.iter().enumerate() {
        let mut ids = [0; 3];
        for (si, t) in row.iter().enumerate() {
            let mut w = vec![1i64];
            for i in 0..k {
                w.push(beta(&|j| t.updates[j].constant, i));
            }
            let key = (q, t.to, w);
            ids[si] = *index.entry(key.clone()).or_insert_with(|| {
                arcs.push(key);
                arcs.len() - 1
            });
        }
        arc_of.push(ids);
    }
    let mut init_weight = vec![SIGNATURE_ARITY as i64 - 1];
    for i in 0..k {
        init_weight.push(beta(&|j| ra.registers[j].init, i));
    }
    InvariantDigraph {
        node_names: ra.state_names.clone(),
        initial: ra.initial,
        accepting: ra.accepting.clone(),
        arcs,
        arc_of,
        init_weight,
    }
}

impl InvariantDigraph {
    pub fn instantiate(&self, coeffs: &[i64]) -> WeightedDigraph {
        let mut g = WeightedDigraph::new(self.node_names.len());
        for (i, (a, b, w)) in self.arcs.iter().enumerate() {
            g.add_arc(*a, *b, dot(w, coeffs), i);
        }
        g
    }

    /// Circuits as summed weight forms, one per choice among parallel arcs.
    pub fn circuit_forms(&self) -> Result<Vec<(Vec<usize>, Vec<i64>)>, TooManyCircuits> {
        let edges: Vec<(usize, usize)> = self.arcs.iter().map(|(a, b, _)| (*a, *b)).collect();
        let mut out = Vec::new();
        let width = self.init_weight.len();
        for cyc in simple_node_circuits(self.node_names.len(), &edges)? {
            let mut forms: Vec<Vec<i64>> = vec![vec![0; width]];
            for i in 0..cyc.len() {
                let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
                let ws: Vec<&Vec<i64>> = self.arcs.iter().filter(|(x, y, _)| *x == a && *y == b).map(|(_, _, w)| w).collect();
                forms = forms
                    .iter()
                    .flat_map(|f| ws.iter().map(move |w| f.iter().zip(w.iter()).map(|(x, y)| x + y).collect()))
                    .collect();
            }
            for f in forms {
                out.push((cyc.clone(), f));
                if out.len() > crate::digraph::CIRCUIT_LIMIT {
                    return Err(TooManyCircuits);
                }
            }
        }
        Ok(out)
    }

    /// Lower bound `init + sum of arc weights` along the run of `word` (no constant term).
    pub fn walk_weight(&self, word: &[Symbol], coeffs: &[i64]) -> i64 {
        let mut q = self.initial;
        let mut total = dot(&self.init_weight, coeffs);
        for &s in word {
            let a = self.arc_of[q][s.index()];
            total += dot(&self.arcs[a].2, coeffs);
            q = self.arcs[a].1;
        }
        total
    }

    /// A circuit of negative weight under `coeffs`, as node names and weight.
    pub fn negative_circuit(&self, coeffs: &[i64]) -> Option<(Vec<String>, i64)> {
        let forms = self.circuit_forms().ok()?;
        forms
            .into_iter()
            .map(|(c, f)| (c, dot(&f, coeffs)))
            .filter(|(_, w)| *w < 0)
            .min_by_key(|(c, w)| (*w, c.len(), c.clone()))
            .map(|(c, w)| {
                let mut names: Vec<String> = c.iter().map(|&q| self.node_names[q].clone()).collect();
                names.push(self.node_names[c[0]].clone());
                (names, w)
            })
    }
}

/// Coefficients `(e0, ..., ek)` making every circuit non-negative, minimising circuit
/// weight plus coefficient magnitude over the box `[-bound, bound]` in the sign orthant.
pub fn find_coefficients(dg: &InvariantDigraph, signs: &[Sign], bound: i64) -> Result<Option<Vec<i64>>, TooManyCircuits> {
    let forms: Vec<Vec<i64>> = dg.circuit_forms()?.into_iter().map(|(_, f)| f).collect();
    let ranges: Vec<(i64, i64)> = signs
        .iter()
        .enumerate()
        .map(|(i, s)| match (s, i) {
            (Sign::Plus, 0) => (0, bound),
            (Sign::Plus, _) => (1, bound),
            (Sign::Minus, _) => (-bound, -1),
        })
        .collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return Ok(None);
    }
    let mut e: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut best: Option<(Vec<i64>, Vec<i64>)> = None;
    loop {
        let ws: Vec<i64> = forms.iter().map(|f| dot(f, &e)).collect();
        if ws.iter().all(|&w| w >= 0) {
            let obj = ws.iter().sum::<i64>() + e[1..].iter().map(|x| x.abs()).sum::<i64>();
            let mut key = vec![obj, e[0].abs()];
            key.extend_from_slice(&e[1..]);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, e.clone()));
            }
        }
        let mut p = e.len();
        loop {
            if p == 0 {
                return Ok(best.map(|(_, e)| e));
            }
            p -= 1;
            if e[p] < ranges[p].1 {
                e[p] += 1;
                for x in p + 1..e.len() {
                    e[x] = ranges[x].0;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowerBound {
    /// No accepted non-empty word.
    Empty,
    NegativeCycle,
    /// Minimum of `e0*n + sum ei*Ri` over accepted words of length at least one.
    Min(i64),
}

fn useful_nodes(dg: &InvariantDigraph) -> Vec<bool> {
    let n = dg.node_names.len();
    let mut rev = vec![Vec::new(); n];
    for (a, b, _) in &dg.arcs {
        rev[*b].push(*a);
    }
    let mut co = dg.accepting.clone();
    let mut stack: Vec<usize> = (0..n).filter(|&q| co[q]).collect();
    while let Some(q) = stack.pop() {
        for &p in &rev[q] {
            if !co[p] {
                co[p] = true;
                stack.push(p);
            }
        }
    }
    co
}

/// Shortest non-empty walk from the initial node to an accepting node, restricted to
/// nodes that can still reach acceptance.
pub fn lower_bound(dg: &InvariantDigraph, coeffs: &[i64]) -> LowerBound {
    let useful = useful_nodes(dg);
    let n = dg.node_names.len();
    let src = n;
    let mut g = WeightedDigraph::new(n + 1);
    for (i, (a, b, w)) in dg.arcs.iter().enumerate() {
        if !useful[*a] || !useful[*b] {
            continue;
        }
        let wt = dot(w, coeffs);
        g.add_arc(*a, *b, wt, i);
        if *a == dg.initial {
            g.add_arc(src, *b, wt, i);
        }
    }
    match bellman_ford(&g, src) {
        ShortestPaths::NegativeCycle(_) => LowerBound::NegativeCycle,
        ShortestPaths::Distances(d) => {
            match (0..n).filter(|&q| dg.accepting[q]).filter_map(|q| d[q]).min() {
                None => LowerBound::Empty,
                Some(m) => LowerBound::Min(dot(&dg.init_weight, coeffs) + m),
            }
        }
    }
}

/// `e` such that `e + e0*n + sum ei*Ri >= 0` on every accepted series with `n >= 2`.
pub fn constant_term(dg: &InvariantDigraph, coeffs: &[i64]) -> Option<i64> {
    match lower_bound(dg, coeffs) {
        LowerBound::Min(m) => Some(-m),
        LowerBound::Empty => None,
        LowerBound::NegativeCycle => panic!("negative cycle under synthesized coefficients"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precondition {
    None,
    NonDefault,
    LengthCond(String),
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precondition::None => f.write_str("none"),
            Precondition::NonDefault => f.write_str("non_default"),
            Precondition::LengthCond(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearInvariant {
    pub e: i64,
    pub e0: i64,
    pub coeffs: Vec<i64>,
    pub precondition: Precondition,
    pub constraints: Vec<String>,
    pub signs: Vec<Sign>,
    pub delayed: bool,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl LinearInvariant {
    /// Value of `e + e0*n + sum ei*Ri`.
    pub fn slack(&self, n: u64, results: &[u64]) -> i64 {
        self.e + self.e0 * n as i64 + self.coeffs.iter().zip(results).map(|(c, r)| c * *r as i64).sum::<i64>()
    }

    /// Whether the precondition applies to a series with these results.
    pub fn applies(&self, n: u64, results: &[u64]) -> bool {
        if n < SIGNATURE_ARITY {
            return false;
        }
        match self.precondition {
            Precondition::NonDefault => results.iter().all(|&r| r > 0),
            _ => true,
        }
    }

    pub fn holds(&self, n: u64, results: &[u64]) -> bool {
        !self.applies(n, results) || self.slack(n, results) >= 0
    }

    /// Divide the linear part by its gcd; the constant rounds down, which is exact on integers.
    pub fn canonical(&self) -> LinearInvariant {
        let g = self.coeffs.iter().fold(self.e0, |g, &c| gcd(g, c));
        let mut out = self.clone();
        if g > 1 {
            out.e0 /= g;
            for c in &mut out.coeffs {
                *c /= g;
            }
            out.e = self.e.div_euclid(g);
        }
        out
    }

    pub fn linear_part(&self) -> (i64, Vec<i64>) {
        (self.e0, self.coeffs.clone())
    }

    /// Human-readable form over register names `R1..Rk`.
    pub fn render(&self, names: &[&str]) -> String {
        let mut terms = Vec::new();
        for (c, name) in self.coeffs.iter().zip(names) {
            terms.push((*c, String::from(*name)));
        }
        if self.e0 != 0 {
            terms.push((self.e0, String::from("n")));
        }
        let mut s = String::new();
        for (i, (c, v)) in terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let mag = c.abs();
            let sep = if i > 0 { " " } else { "" };
            let pad = if i > 0 { " " } else { "" };
            if mag == 1 {
                s.push_str(&format!("{}{}{}{}", sep, sign, pad, v));
            } else {
                s.push_str(&format!("{}{}{}{}{}", sep, sign, pad, mag, v));
            }
        }
        if self.e != 0 {
            s.push_str(&format!(" {} {}", if self.e < 0 { "-" } else { "+" }, self.e.abs()));
        }
        s.push_str(" >= 0");
        s
    }
}

impl fmt::Display for LinearInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.coeffs.len()).map(|i| format!("R{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        f.write_str(&self.render(&refs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    pub delayed: bool,
    pub non_default: bool,
    pub bound: i64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { delayed: false, non_default: false, bound: 3 }
    }
}

pub fn build_product(ras: &[(&str, &RegisterAutomaton)], opts: SynthOptions) -> ProductAutomaton {
    let p = product_with(ras, opts.non_default).trimmed();
    if opts.delayed {
        delayed_intersection(&p)
    } else {
        p
    }
}

/// Keep, among invariants with the same linear part, only the tightest constant.
pub fn drop_dominated(invs: Vec<LinearInvariant>) -> Vec<LinearInvariant> {
    let mut best: BTreeMap<(Precondition, i64, Vec<i64>), LinearInvariant> = BTreeMap::new();
    for inv in invs {
        let c = inv.canonical();
        let key = (c.precondition.clone(), c.e0, c.coeffs.clone());
        match best.get(&key) {
            Some(old) if old.e <= c.e => {}
            _ => {
                best.insert(key, c);
            }
        }
    }
    best.into_values().collect()
}

pub fn synthesize_product(p: &ProductAutomaton, names: &[String], opts: SynthOptions, pre: Precondition) -> Result<Vec<LinearInvariant>, TooManyCircuits> {
    let mut out = Vec::new();
    for signs in sign_vectors(p.k() + 1) {
        let dg = invariant_digraph(p, &signs);
        let Some(coeffs) = find_coefficients(&dg, &signs, opts.bound)? else { continue };
        let Some(e) = constant_term(&dg, &coeffs) else { continue };
        out.push(LinearInvariant {
            e,
            e0: coeffs[0],
            coeffs: coeffs[1..].to_vec(),
            precondition: pre.clone(),
            constraints: names.to_vec(),
            signs,
            delayed: opts.delayed,
        });
    }
    Ok(drop_dominated(out))
}

pub fn synthesize(specs: &[ConstraintSpec], opts: SynthOptions) -> Result<Vec<LinearInvariant>, TooManyCircuits> {
    let ras: Vec<RegisterAutomaton> = specs.iter().map(|s| s.register_automaton()).collect();
    let names: Vec<String> = specs.iter().map(|s| s.name()).collect();
    let pairs: Vec<(&str, &RegisterAutomaton)> = names.iter().map(|n| n.as_str()).zip(ras.iter()).collect();
    let p = build_product(&pairs, opts);
    let pre = if opts.non_default { Precondition::NonDefault } else { Precondition::None };
    synthesize_product(&p, &names, opts, pre)
}

/// Minimum of `a*Rj - b*Rk` over accepted non-empty words of a restricted product.
fn pair_minimum(p: &ProductAutomaton, j: usize, k: usize, a: i64, b: i64) -> LowerBound {
    let mut signs = vec![Sign::Plus; p.k() + 1];
    signs[k + 1] = Sign::Minus;
    let dg = invariant_digraph(p, &signs);
    let mut coeffs = vec![0; p.k() + 1];
    coeffs[j + 1] = a;
    coeffs[k + 1] = -b;
    lower_bound(&dg, &coeffs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DependentOutcome {
    ProvedInfeasible(Vec<String>),
    Unknown(String),
}

/// Parity DFA: main register of `ra` congruent to `residue` modulo 2.
pub fn parity_filter(ra: &RegisterAutomaton, residue: u64) -> Dfa {
    let m = mod_expansion(ra, 2).expect("modulus 2");
    let main = ra.main();
    m.dfa(ra, |_, v| v[main] % 2 == residue)
}

/// Try to show `Rj = c*Rk + d` never holds on words accepted by `filter` (n >= 2),
/// splitting on the parity of `Rj`.
pub fn prove_dependent(
    specs: [&ConstraintSpec; 2],
    j: usize,
    c: u64,
    d: u64,
    filter: &Dfa,
) -> DependentOutcome {
    let k = 1 - j;
    let ras = [specs[0].register_automaton(), specs[1].register_automaton()];
    let names = [specs[0].name(), specs[1].name()];
    let base = product(&[(names[0].as_str(), &ras[0]), (names[1].as_str(), &ras[1])]);
    let mut certs = Vec::new();
    for b in 0..2u64 {
        let kres = (b + 2 - d % 2) % 2;
        if c % 2 == 0 && kres != 0 {
            certs.push(format!("R{} mod 2 = {}: parity contradiction", j + 1, b));
            continue;
        }
        let mut f = intersect(filter, &parity_filter(&ras[j], b));
        if c % 2 == 1 {
            f = intersect(&f, &parity_filter(&ras[k], kres));
        }
        let f = crate::dfa::minimize(&f);
        if f.trim().accepting.iter().all(|&a| !a) {
            certs.push(format!("R{} mod 2 = {}: empty", j + 1, b));
            continue;
        }
        let p = delayed_intersection(&restrict(&base, &f).trimmed());
        match pair_minimum(&p, j, k, 1, c as i64) {
            LowerBound::Empty => {
                certs.push(format!("R{} mod 2 = {}: empty", j + 1, b));
                continue;
            }
            LowerBound::Min(m) if m > d as i64 => {
                certs.push(format!("R{} mod 2 = {}: R{} - {}*R{} >= {}", j + 1, b, j + 1, c, k + 1, m));
                continue;
            }
            _ => {}
        }
        match pair_minimum(&p, k, j, c as i64, 1) {
            LowerBound::Min(m) if m > -(d as i64) => {
                certs.push(format!("R{} mod 2 = {}: {}*R{} - R{} >= {}", j + 1, b, c, k + 1, j + 1, m));
            }
            _ => return DependentOutcome::Unknown(format!("no certificate for R{} mod 2 = {}", j + 1, b)),
        }
    }
    DependentOutcome::ProvedInfeasible(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::constraint;

    fn pair(a: &str, b: &str) -> Vec<ConstraintSpec> {
        vec![constraint(a).unwrap(), constraint(b).unwrap()]
    }

    fn peak_valley() -> ProductAutomaton {
        let a = constraint("nb_peak").unwrap().register_automaton();
        let b = constraint("nb_valley").unwrap().register_automaton();
        product(&[("P", &a), ("V", &b)])
    }

    fn sv(s: &str) -> Vec<Sign> {
        s.chars().map(|c| if c == '+' { Sign::Plus } else { Sign::Minus }).collect()
    }

    #[test]
    fn peak_valley_digraph_shape() {
        let p = peak_valley();
        assert_eq!(p.ra.num_states(), 3);
        let dg = invariant_digraph(&p, &sv("+-+"));
        let special: Vec<&Vec<i64>> = dg.arcs.iter().map(|(_, _, w)| w).filter(|w| w[1] != 0 || w[2] != 0).collect();
        assert_eq!(special.len(), 2);
        assert_eq!(dg.circuit_forms().unwrap().len(), 4);
        assert_eq!(invariant_digraph(&p, &sv("---")).arcs, dg.arcs);
    }

    #[test]
    fn peak_valley_coefficient_table() {
        let p = peak_valley();
        let table = [("+--", [1, -1, -1]), ("+-+", [0, -1, 1]), ("++-", [0, 1, -1]), ("+++", [0, 1, 1])];
        for (s, want) in table {
            let dg = invariant_digraph(&p, &sv(s));
            assert_eq!(find_coefficients(&dg, &sv(s), 3).unwrap().unwrap(), want, "{}", s);
        }
        for s in ["-++", "---"] {
            let dg = invariant_digraph(&p, &sv(s));
            assert_eq!(find_coefficients(&dg, &sv(s), 3).unwrap(), None);
        }
    }

    #[test]
    fn peak_valley_distances() {
        let p = peak_valley();
        let dg = invariant_digraph(&p, &sv("+-+"));
        let g = dg.instantiate(&[0, -1, 1]);
        let ShortestPaths::Distances(d) = bellman_ford(&g, dg.initial) else { panic!() };
        let by_name = |n: &str| d[dg.node_names.iter().position(|x| x == n).unwrap()].unwrap();
        assert_eq!(by_name("(s,s)"), 0);
        let others: Vec<i64> = (0..3).filter(|&q| q != dg.initial).map(|q| d[q].unwrap()).collect();
        assert!(others.contains(&0) && others.contains(&-1));
        assert_eq!(constant_term(&dg, &[0, -1, 1]), Some(1));
    }

    #[test]
    fn peak_valley_invariants() {
        let invs = synthesize(&pair("nb_peak", "nb_valley"), SynthOptions::default()).unwrap();
        let mut got: Vec<(i64, i64, Vec<i64>)> = invs.iter().map(|i| (i.e, i.e0, i.coeffs.clone())).collect();
        got.sort();
        let mut want = vec![(1, 0, vec![-1, 1]), (1, 0, vec![1, -1]), (-2, 1, vec![-1, -1]), (0, 0, vec![1, 1])];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn plateau_negative_cycle_and_delay() {
        let specs = pair("nb_proper_plateau", "sum_width_proper_plateau");
        let ras: Vec<_> = specs.iter().map(|s| s.register_automaton()).collect();
        let p = product(&[("a", &ras[0]), ("b", &ras[1])]);
        let dg = invariant_digraph(&p, &sv("+-+"));
        let (cyc, w) = dg.negative_circuit(&[0, -2, 1]).unwrap();
        assert_eq!(w, -1);
        assert_eq!(cyc.len(), 4);
        let plain = synthesize(&specs, SynthOptions::default()).unwrap();
        let delayed = synthesize(&specs, SynthOptions { delayed: true, ..Default::default() }).unwrap();
        let has = |v: &[LinearInvariant]| v.iter().any(|i| i.e == 0 && i.e0 == 0 && i.coeffs == [-2, 1]);
        assert!(!has(&plain));
        assert!(has(&delayed));
    }

    #[test]
    fn terrace_non_default() {
        let specs = pair("nb_decreasing_terrace", "sum_width_increasing_terrace");
        let plain = synthesize(&specs, SynthOptions::default()).unwrap();
        assert!(plain.iter().any(|i| i.e == -2 && i.e0 == 1 && i.coeffs == [-2, -1]));
        let nd = synthesize(&specs, SynthOptions { non_default: true, ..Default::default() }).unwrap();
        let inv = nd.iter().find(|i| i.e0 == 1 && i.coeffs == [-2, -1]).unwrap();
        assert_eq!(inv.e, -3);
        assert_eq!(inv.precondition, Precondition::NonDefault);
    }

    #[test]
    fn canonical_rounds_down() {
        let inv = LinearInvariant {
            e: 3,
            e0: 2,
            coeffs: vec![-2, 4],
            precondition: Precondition::None,
            constraints: vec![],
            signs: vec![],
            delayed: false,
        };
        let c = inv.canonical();
        assert_eq!((c.e, c.e0, c.coeffs), (1, 1, vec![-1, 2]));
        assert_eq!(inv.render(&["P", "V"]), "-2P + 4V + 2n + 3 >= 0");
    }

    #[test]
    fn running_pair_dependent_proof() {
        let specs = pair("sum_width_decreasing_sequence", "sum_width_zigzag");
        let odd = parity_filter(&specs[0].register_automaton(), 1);
        match prove_dependent([&specs[0], &specs[1]], 0, 1, 0, &odd) {
            DependentOutcome::ProvedInfeasible(c) => {
                assert!(c.iter().any(|s| s.contains("R1 - 1*R2 >= 2")), "{:?}", c);
            }
            other => panic!("{:?}", other),
        }
        match prove_dependent([&specs[0], &specs[1]], 0, 2, 1, &Dfa::universal()) {
            DependentOutcome::ProvedInfeasible(c) => assert!(c[0].contains("parity")),
            DependentOutcome::Unknown(_) => {}
        }
        let same = pair("nb_peak", "nb_peak");
        assert!(matches!(
            prove_dependent([&same[0], &same[1]], 0, 1, 0, &Dfa::universal()),
            DependentOutcome::Unknown(_)
        ));
    }
}
