//! Register automata with affine updates over the naturals.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dfa::{minimize, Dfa};
use crate::symbol::{Signature, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub init: u64,
}

/// `A_j <- constant + sum_i coeffs[i] * A_i`, evaluated on pre-transition values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    pub constant: u64,
    pub coeffs: Vec<u8>,
}

impl Update {
    pub fn keep(nregs: usize, j: usize) -> Update {
        let mut coeffs = vec![0; nregs];
        coeffs[j] = 1;
        Update { constant: 0, coeffs }
    }

    pub fn apply(&self, values: &[u64]) -> u64 {
        self.constant + self.coeffs.iter().zip(values).map(|(&c, &v)| c as u64 * v).sum::<u64>()
    }

    pub fn is_identity(&self, j: usize) -> bool {
        self.constant == 0 && self.coeffs.iter().enumerate().all(|(i, &c)| c == u8::from(i == j))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub to: usize,
    pub updates: Vec<Update>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterAutomaton {
    pub state_names: Vec<String>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    pub registers: Vec<Register>,
    /// Returned value is `sum_j acceptance[j] * A_j`.
    pub acceptance: Vec<u64>,
    pub trans: Vec<[Transition; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub state: usize,
    pub values: Vec<u64>,
    pub result: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncrementalCondition {
    NaturalInit,
    UpdateShape,
    MainIsResult,
    MainSelfCoefficient,
    MainFedByPotential,
    PotentialShape,
}

impl IncrementalCondition {
    pub fn id(self) -> &'static str {
        match self {
            IncrementalCondition::NaturalInit => "1",
            IncrementalCondition::UpdateShape => "2",
            IncrementalCondition::MainIsResult => "2a",
            IncrementalCondition::MainSelfCoefficient => "2b",
            IncrementalCondition::MainFedByPotential => "2c",
            IncrementalCondition::PotentialShape => "3",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IncrementalReport {
    Pass,
    Violated { condition: IncrementalCondition, detail: String },
}

impl RegisterAutomaton {
    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_registers(&self) -> usize {
        self.registers.len()
    }

    pub fn main(&self) -> usize {
        self.registers.len() - 1
    }

    pub fn init_values(&self) -> Vec<u64> {
        self.registers.iter().map(|r| r.init).collect()
    }

    pub fn transition(&self, q: usize, s: Symbol) -> &Transition {
        &self.trans[q][s.index()]
    }

    pub fn step_values(&self, q: usize, s: Symbol, values: &[u64]) -> (usize, Vec<u64>) {
        let t = self.transition(q, s);
        (t.to, t.updates.iter().map(|u| u.apply(values)).collect())
    }

    pub fn result_of(&self, values: &[u64]) -> u64 {
        self.acceptance.iter().zip(values).map(|(a, v)| a * v).sum()
    }

    pub fn run(&self, word: &[Symbol]) -> RunResult {
        let mut q = self.initial;
        let mut values = self.init_values();
        for &s in word {
            let (q2, v2) = self.step_values(q, s, &values);
            q = q2;
            values = v2;
        }
        let result = self.result_of(&values);
        RunResult { state: q, values, result }
    }

    pub fn run_sig(&self, sig: &Signature) -> RunResult {
        self.run(sig.symbols())
    }

    /// Swap `<` and `>` on every transition.
    pub fn mirrored(&self) -> RegisterAutomaton {
        let mut out = self.clone();
        for row in &mut out.trans {
            row.swap(0, 2);
        }
        out
    }

    /// The underlying state graph as a complete DFA (accepting states kept).
    pub fn state_dfa(&self) -> Dfa {
        Dfa {
            trans: self.trans.iter().map(|row| [Some(row[0].to), Some(row[1].to), Some(row[2].to)]).collect(),
            initial: self.initial,
            accepting: self.accepting.clone(),
        }
    }

    pub fn check_incremental_property(&self) -> IncrementalReport {
        use IncrementalCondition::*;
        let r = self.num_registers();
        let fail = |condition, detail: String| IncrementalReport::Violated { condition, detail };
        if r == 0 {
            return fail(MainIsResult, String::from("no registers"));
        }
        let main = r - 1;
        if self.acceptance.iter().enumerate().any(|(j, &a)| a != u64::from(j == main)) {
            return fail(MainIsResult, String::from("acceptance is not the main register"));
        }
        let mut fed = false;
        for (q, row) in self.trans.iter().enumerate() {
            for (si, t) in row.iter().enumerate() {
                let at = || format!("{} on {}", self.state_names[q], Symbol::from_index(si).as_char());
                if t.updates.len() != r {
                    return fail(UpdateShape, format!("{}: wrong update count", at()));
                }
                for u in &t.updates {
                    if u.coeffs.len() != r || u.coeffs.iter().any(|&c| c > 1) {
                        return fail(UpdateShape, format!("{}: coefficient outside {{0,1}}", at()));
                    }
                }
                let m = &t.updates[main];
                if m.coeffs[main] != 1 {
                    return fail(MainSelfCoefficient, format!("{}: main register not kept", at()));
                }
                if m.coeffs[..main].iter().any(|&c| c > 0) {
                    fed = true;
                }
                for j in 0..main {
                    let u = &t.updates[j];
                    if u.coeffs.iter().enumerate().any(|(i, &c)| i != j && c > 0) {
                        return fail(PotentialShape, format!("{}: potential register {} reads another register", at(), j));
                    }
                    if m.coeffs[j] > 0 && u.coeffs[j] != 0 {
                        return fail(PotentialShape, format!("{}: potential register {} not reset when used", at(), j));
                    }
                }
            }
        }
        if main > 0 && !fed {
            return fail(MainFedByPotential, String::from("potential registers never reach the main register"));
        }
        IncrementalReport::Pass
    }

    /// Merge states with identical acceptance and identical labelled moves.
    pub fn minimized(&self) -> RegisterAutomaton {
        let reach = self.state_dfa();
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            for t in reach.trans[order[i]].iter().flatten() {
                if !seen[*t] {
                    seen[*t] = true;
                    order.push(*t);
                }
            }
            i += 1;
        }
        let mut block: Vec<usize> = vec![0; self.num_states()];
        let mut count = 0;
        loop {
            let mut sigs: BTreeMap<(usize, bool, Vec<(usize, Vec<(u64, Vec<u8>)>)>), usize> = BTreeMap::new();
            let mut next = vec![0; self.num_states()];
            for &q in &order {
                let moves = self.trans[q]
                    .iter()
                    .map(|t| (block[t.to], t.updates.iter().map(|u| (u.constant, u.coeffs.clone())).collect()))
                    .collect();
                let key = (block[q], self.accepting[q], moves);
                let n = sigs.len();
                next[q] = *sigs.entry(key).or_insert(n);
            }
            let new_count = sigs.len();
            block = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // Renumber blocks in BFS order of representatives.
        let mut rename = vec![usize::MAX; count];
        let mut reps = Vec::new();
        for &q in &order {
            if rename[block[q]] == usize::MAX {
                rename[block[q]] = reps.len();
                reps.push(q);
            }
        }
        let trans = reps
            .iter()
            .map(|&q| {
                self.trans[q].clone().map(|t| Transition { to: rename[block[t.to]], updates: t.updates })
            })
            .collect();
        RegisterAutomaton {
            state_names: reps.iter().map(|&q| self.state_names[q].clone()).collect(),
            initial: rename[block[self.initial]],
            accepting: reps.iter().map(|&q| self.accepting[q]).collect(),
            registers: self.registers.clone(),
            acceptance: self.acceptance.clone(),
            trans,
        }
    }
}

/// Registers of one factor inside a product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub name: String,
    pub start: usize,
    pub len: usize,
    pub acceptance: Vec<u64>,
}

impl Factor {
    pub fn main(&self) -> usize {
        self.start + self.len - 1
    }

    pub fn potentials(&self) -> core::ops::Range<usize> {
        self.start..self.start + self.len - 1
    }

    pub fn range(&self) -> core::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductAutomaton {
    pub ra: RegisterAutomaton,
    pub factors: Vec<Factor>,
    /// Per product state, the factor states it pairs (plus found bits when tracked).
    pub components: Vec<Vec<usize>>,
}

impl ProductAutomaton {
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn results_of(&self, values: &[u64]) -> Vec<u64> {
        self.factors
            .iter()
            .map(|f| f.acceptance.iter().zip(&values[f.range()]).map(|(a, v)| a * v).sum())
            .collect()
    }

    pub fn run(&self, word: &[Symbol]) -> (usize, Vec<u64>) {
        let r = self.ra.run(word);
        let res = self.results_of(&r.values);
        (r.state, res)
    }

    /// Drop states that cannot reach an accepting state (the initial state is kept).
    pub fn trimmed(&self) -> ProductAutomaton {
        let d = self.ra.state_dfa();
        let n = d.num_states();
        let mut rev = vec![Vec::new(); n];
        for (q, row) in d.trans.iter().enumerate() {
            for t in row.iter().flatten() {
                rev[*t].push(q);
            }
        }
        let mut co = d.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| co[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !co[p] {
                    co[p] = true;
                    stack.push(p);
                }
            }
        }
        if co.iter().all(|&c| c) {
            return self.clone();
        }
        // Transitions into useless states are redirected to a non-accepting sink so the
        // automaton stays complete; the sink has no arcs that matter to synthesis.
        let mut map = vec![usize::MAX; n];
        let mut keep = Vec::new();
        for q in 0..n {
            if co[q] || q == self.ra.initial {
                map[q] = keep.len();
                keep.push(q);
            }
        }
        let sink = keep.len();
        let nregs = self.ra.num_registers();
        let keep_all: Vec<Update> = (0..nregs).map(|j| Update::keep(nregs, j)).collect();
        let mut trans: Vec<[Transition; 3]> = keep
            .iter()
            .map(|&q| {
                self.ra.trans[q].clone().map(|t| {
                    if map[t.to] == usize::MAX {
                        Transition { to: sink, updates: keep_all.clone() }
                    } else {
                        Transition { to: map[t.to], updates: t.updates }
                    }
                })
            })
            .collect();
        let sink_row = [0, 1, 2].map(|_| Transition { to: sink, updates: keep_all.clone() });
        trans.push(sink_row);
        let mut state_names: Vec<String> = keep.iter().map(|&q| self.ra.state_names[q].clone()).collect();
        state_names.push(String::from("sink"));
        let mut accepting: Vec<bool> = keep.iter().map(|&q| self.ra.accepting[q]).collect();
        accepting.push(false);
        let mut components: Vec<Vec<usize>> = keep.iter().map(|&q| self.components[q].clone()).collect();
        components.push(Vec::new());
        ProductAutomaton {
            ra: RegisterAutomaton {
                state_names,
                initial: map[self.ra.initial],
                accepting,
                registers: self.ra.registers.clone(),
                acceptance: self.ra.acceptance.clone(),
                trans,
            },
            factors: self.factors.clone(),
            components,
        }
    }

    /// Indices of states that can reach an accepting state.
    pub fn useful_states(&self) -> Vec<bool> {
        let d = self.ra.state_dfa();
        let t = d.trim();
        let _ = t;
        let n = d.num_states();
        let mut rev = vec![Vec::new(); n];
        for (q, row) in d.trans.iter().enumerate() {
            for x in row.iter().flatten() {
                rev[*x].push(q);
            }
        }
        let mut co = d.accepting.clone();
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
}

fn prefixed(name: &str, reg: &str) -> String {
    format!("{}.{}", name, reg)
}

/// Reachable synchronous product; registers are concatenated and never merged.
/// With `found_bits`, each state also records per factor whether the factor's main
/// register has changed, and only states with every bit set are accepting.
pub fn product_with(ras: &[(&str, &RegisterAutomaton)], found_bits: bool) -> ProductAutomaton {
    let k = ras.len();
    let mut registers = Vec::new();
    let mut factors = Vec::new();
    for (name, ra) in ras {
        let start = registers.len();
        for r in &ra.registers {
            registers.push(Register { name: prefixed(name, &r.name), init: r.init });
        }
        factors.push(Factor { name: String::from(*name), start, len: ra.num_registers(), acceptance: ra.acceptance.clone() });
    }
    let nregs = registers.len();
    let mut key0: Vec<usize> = ras.iter().map(|(_, ra)| ra.initial).collect();
    if found_bits {
        key0.extend(core::iter::repeat_n(0, k));
    }
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    index.insert(key0.clone(), 0);
    let mut keys = vec![key0];
    let mut trans = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let key = keys[i].clone();
        let row = Symbol::ALL.map(|s| {
            let mut next = Vec::with_capacity(key.len());
            let mut updates = Vec::with_capacity(nregs);
            let mut bits: Vec<usize> = if found_bits { key[k..].to_vec() } else { Vec::new() };
            for (fi, (_, ra)) in ras.iter().enumerate() {
                let t = ra.transition(key[fi], s);
                next.push(t.to);
                let f = &factors[fi];
                for u in &t.updates {
                    let mut coeffs = vec![0u8; nregs];
                    coeffs[f.start..f.start + f.len].copy_from_slice(&u.coeffs);
                    updates.push(Update { constant: u.constant, coeffs });
                }
                if found_bits && !t.updates[ra.main()].is_identity(ra.main()) {
                    bits[fi] = 1;
                }
            }
            next.extend(bits);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = keys.len();
                    index.insert(next.clone(), id);
                    keys.push(next);
                    id
                }
            };
            Transition { to: id, updates }
        });
        trans.push(row);
        i += 1;
    }
    let state_names = keys
        .iter()
        .map(|key| {
            let mut s = String::from("(");
            for (fi, (_, ra)) in ras.iter().enumerate() {
                if fi > 0 {
                    s.push(',');
                }
                s.push_str(&ra.state_names[key[fi]]);
            }
            if found_bits {
                s.push('|');
                for b in &key[k..] {
                    s.push(if *b == 1 { '1' } else { '0' });
                }
            }
            s.push(')');
            s
        })
        .collect();
    let accepting = keys
        .iter()
        .map(|key| {
            ras.iter().enumerate().all(|(fi, (_, ra))| ra.accepting[key[fi]]) && (!found_bits || key[k..].iter().all(|&b| b == 1))
        })
        .collect();
    let mut acceptance = vec![0; nregs];
    for f in &factors {
        acceptance[f.main()] = 1;
    }
    ProductAutomaton {
        ra: RegisterAutomaton { state_names, initial: 0, accepting, registers, acceptance, trans },
        factors,
        components: keys,
    }
}

pub fn product(ras: &[(&str, &RegisterAutomaton)]) -> ProductAutomaton {
    product_with(ras, false)
}

/// Synchronous product of a register automaton with a plain DFA acting as a filter:
/// states pair both, registers are unchanged, accepting iff both accept. Missing DFA
/// moves go to a rejecting sink.
pub fn restrict(p: &ProductAutomaton, filter: &Dfa) -> ProductAutomaton {
    let f = filter.complete();
    let nregs = p.ra.num_registers();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut keys = vec![(p.ra.initial, f.initial)];
    index.insert(keys[0], 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let (q, d) = keys[i];
        let row = Symbol::ALL.map(|s| {
            let t = p.ra.transition(q, s);
            let d2 = f.step(d, s).unwrap();
            let key = (t.to, d2);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = keys.len();
                    index.insert(key, id);
                    keys.push(key);
                    id
                }
            };
            Transition { to: id, updates: t.updates.clone() }
        });
        trans.push(row);
        i += 1;
    }
    let _ = nregs;
    ProductAutomaton {
        ra: RegisterAutomaton {
            state_names: keys.iter().map(|&(q, d)| format!("{}#{}", p.ra.state_names[q], d)).collect(),
            initial: 0,
            accepting: keys.iter().map(|&(q, d)| p.ra.accepting[q] && f.accepting[d]).collect(),
            registers: p.ra.registers.clone(),
            acceptance: p.ra.acceptance.clone(),
            trans,
        },
        factors: p.factors.clone(),
        components: keys.iter().map(|&(q, _)| p.components[q].clone()).collect(),
    }
}

/// An automaton whose states carry (register-automaton state, register values).
#[derive(Debug, Clone)]
pub struct ValueDfa {
    pub trans: Vec<[usize; 3]>,
    pub initial: usize,
    pub labels: Vec<(usize, Vec<u64>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpansionError {
    ZeroModulus,
    TooLarge(usize),
}

impl core::fmt::Display for ExpansionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExpansionError::ZeroModulus => write!(f, "modulus must be at least 1"),
            ExpansionError::TooLarge(n) => write!(f, "expansion exceeds {} states", n),
        }
    }
}

pub const EXPANSION_LIMIT: usize = 2_000_000;

impl ValueDfa {
    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    /// Plain DFA accepting where the register-automaton state accepts and `pred` holds.
    pub fn raw_dfa(&self, ra: &RegisterAutomaton, pred: impl Fn(usize, &[u64]) -> bool) -> Dfa {
        Dfa {
            trans: self.trans.iter().map(|r| [Some(r[0]), Some(r[1]), Some(r[2])]).collect(),
            initial: self.initial,
            accepting: self.labels.iter().map(|(q, v)| ra.accepting[*q] && pred(*q, v)).collect(),
        }
    }

    pub fn dfa(&self, ra: &RegisterAutomaton, pred: impl Fn(usize, &[u64]) -> bool) -> Dfa {
        minimize(&self.raw_dfa(ra, pred))
    }
}

fn expand(ra: &RegisterAutomaton, norm: impl Fn(u64) -> u64) -> Result<ValueDfa, ExpansionError> {
    let init_vals: Vec<u64> = ra.init_values().into_iter().map(&norm).collect();
    let mut index: BTreeMap<(usize, Vec<u64>), usize> = BTreeMap::new();
    let mut labels = vec![(ra.initial, init_vals.clone())];
    index.insert((ra.initial, init_vals), 0);
    let mut trans = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let (q, vals) = labels[id].clone();
        let mut row = [0usize; 3];
        for s in Symbol::ALL {
            let (q2, v2) = ra.step_values(q, s, &vals);
            let v2: Vec<u64> = v2.into_iter().map(&norm).collect();
            let key = (q2, v2);
            let nid = match index.get(&key) {
                Some(&x) => x,
                None => {
                    let x = labels.len();
                    if x >= EXPANSION_LIMIT {
                        return Err(ExpansionError::TooLarge(EXPANSION_LIMIT));
                    }
                    index.insert(key.clone(), x);
                    labels.push(key);
                    queue.push_back(x);
                    x
                }
            };
            row[s.index()] = nid;
        }
        if trans.len() <= id {
            trans.resize(id + 1, [0; 3]);
        }
        trans[id] = row;
    }
    Ok(ValueDfa { trans, initial: 0, labels })
}

/// Register values saturate at `cap + 1`; exact for every value up to `cap` because
/// updates are monotone with natural constants.
pub fn capped_expansion(ra: &RegisterAutomaton, cap: u64) -> Result<ValueDfa, ExpansionError> {
    expand(ra, |v| v.min(cap + 1))
}

/// Register values modulo `modulus`; exact because updates are linear over the naturals.
pub fn mod_expansion(ra: &RegisterAutomaton, modulus: u64) -> Result<ValueDfa, ExpansionError> {
    if modulus == 0 {
        return Err(ExpansionError::ZeroModulus);
    }
    expand(ra, |v| v % modulus)
}

/// `table[q][i][j]`: lower bound of potential register j of factor i on entering q.
pub type DelayTable = Vec<Vec<Vec<u64>>>;

pub fn delay_table(p: &ProductAutomaton) -> DelayTable {
    let ra = &p.ra;
    let n = ra.num_states();
    let mut incoming: Vec<Vec<(usize, &Transition)>> = vec![Vec::new(); n];
    for (q, row) in ra.trans.iter().enumerate() {
        for t in row {
            incoming[t.to].push((q, t));
        }
    }
    (0..n)
        .map(|q| {
            p.factors
                .iter()
                .map(|f| {
                    f.potentials()
                        .map(|j| {
                            if incoming[q].iter().any(|(_, t)| t.updates[j].coeffs[j] == 0) {
                                return 0;
                            }
                            let others = incoming[q].iter().filter(|(src, _)| *src != q).map(|(_, t)| t.updates[j].constant).min();
                            let m = match others {
                                Some(m) => m,
                                None if q == ra.initial => u64::MAX,
                                None => 0,
                            };
                            if q == ra.initial {
                                m.min(ra.registers[j].init)
                            } else {
                                m
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Rewrite constants so that guaranteed potential-register mass is carried by the main
/// register on the transition that consumes it.
pub fn delayed_intersection(p: &ProductAutomaton) -> ProductAutomaton {
    let delays = delay_table(p);
    let mut out = p.clone();
    let ra = &mut out.ra;
    for (fi, f) in p.factors.iter().enumerate() {
        for (k, j) in f.potentials().enumerate() {
            ra.registers[j].init -= delays[p.ra.initial][fi][k];
        }
    }
    for (q1, row) in p.ra.trans.iter().enumerate() {
        for (si, t) in row.iter().enumerate() {
            let q2 = t.to;
            let nt = &mut ra.trans[q1][si];
            for (fi, f) in p.factors.iter().enumerate() {
                let m = f.main();
                let extra: u64 = f.potentials().enumerate().map(|(k, j)| t.updates[m].coeffs[j] as u64 * delays[q1][fi][k]).sum();
                nt.updates[m].constant = t.updates[m].constant + extra;
                for (k, j) in f.potentials().enumerate() {
                    let u = &t.updates[j];
                    let value = u.constant as i64 + u.coeffs[j] as i64 * delays[q1][fi][k] as i64 - delays[q2][fi][k] as i64;
                    assert!(value >= 0, "negative delayed constant");
                    nt.updates[j].constant = value as u64;
                }
            }
        }
    }
    out
}

/// Small builder used by the catalog: states by name, updates written per register.
pub struct Builder {
    names: Vec<String>,
    regs: Vec<Register>,
    rows: Vec<[Option<Transition>; 3]>,
}

/// How a register changes on a transition, in builder notation.
#[derive(Debug, Clone, Copy)]
pub enum Op {
    Keep,
    Add(u64),
    Set(u64),
    /// Main register absorbs all potential registers of its automaton plus a constant.
    Absorb(u64),
}

impl Builder {
    pub fn new(states: &[&str], regs: &[&str]) -> Builder {
        Builder {
            names: states.iter().map(|s| String::from(*s)).collect(),
            regs: regs.iter().map(|r| Register { name: String::from(*r), init: 0 }).collect(),
            rows: states.iter().map(|_| [None, None, None]).collect(),
        }
    }

    fn id(&self, s: &str) -> usize {
        self.names.iter().position(|n| n == s).expect("unknown state")
    }

    /// `symbols` is a string of signature characters sharing the same move.
    pub fn on(mut self, from: &str, symbols: &str, to: &str, ops: &[Op]) -> Builder {
        let r = self.regs.len();
        assert_eq!(ops.len(), r);
        let updates: Vec<Update> = ops
            .iter()
            .enumerate()
            .map(|(j, op)| {
                let mut coeffs = vec![0u8; r];
                let constant = match *op {
                    Op::Keep => {
                        coeffs[j] = 1;
                        0
                    }
                    Op::Add(c) => {
                        coeffs[j] = 1;
                        c
                    }
                    Op::Set(c) => c,
                    Op::Absorb(c) => {
                        for x in coeffs.iter_mut() {
                            *x = 1;
                        }
                        c
                    }
                };
                Update { constant, coeffs }
            })
            .collect();
        let (f, t) = (self.id(from), self.id(to));
        for c in symbols.chars() {
            let s = Symbol::from_char(c).expect("bad symbol");
            self.rows[f][s.index()] = Some(Transition { to: t, updates: updates.clone() });
        }
        self
    }

    pub fn build(self, initial: &str) -> RegisterAutomaton {
        let initial = self.id(initial);
        let n = self.names.len();
        let r = self.regs.len();
        let mut acceptance = vec![0; r];
        acceptance[r - 1] = 1;
        RegisterAutomaton {
            state_names: self.names,
            initial,
            accepting: vec![true; n],
            registers: self.regs,
            acceptance,
            trans: self.rows.into_iter().map(|row| row.map(|t| t.expect("incomplete automaton"))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counter() -> RegisterAutomaton {
        Builder::new(&["s"], &["R"]).on("s", "<=", "s", &[Op::Keep]).on("s", ">", "s", &[Op::Add(1)]).build("s")
    }

    #[test]
    fn duplicate_self_term_violates_shape() {
        let mut ra = counter();
        ra.trans[0][0].updates[0].coeffs[0] = 2;
        match ra.check_incremental_property() {
            IncrementalReport::Violated { condition, .. } => assert_eq!(condition, IncrementalCondition::UpdateShape),
            IncrementalReport::Pass => panic!("expected violation"),
        }
        assert_eq!(counter().check_incremental_property(), IncrementalReport::Pass);
    }

    #[test]
    fn unary_product_is_isomorphic() {
        let ra = counter();
        let p = product(&[("c", &ra)]);
        assert_eq!(p.ra.trans, ra.trans);
        assert_eq!(p.ra.num_states(), 1);
    }

    #[test]
    fn expansions() {
        let ra = counter();
        let v = capped_expansion(&ra, 0).unwrap();
        assert_eq!(v.num_states(), 2);
        let m = mod_expansion(&ra, 1).unwrap();
        assert_eq!(m.num_states(), 1);
        assert_eq!(mod_expansion(&ra, 0).unwrap_err(), ExpansionError::ZeroModulus);
        let frozen = Builder::new(&["a", "b"], &["R"]).on("a", "<=>", "b", &[Op::Keep]).on("b", "<=>", "a", &[Op::Keep]).build("a");
        assert_eq!(capped_expansion(&frozen, 0).unwrap().num_states(), 2);
    }

    #[test]
    fn zero_delay_table_leaves_automaton_unchanged() {
        let ra = counter();
        let p = product(&[("c", &ra)]);
        assert_eq!(delayed_intersection(&p), p);
        assert!(delay_table(&p).iter().all(|q| q.iter().all(|f| f.is_empty())));
    }
}
