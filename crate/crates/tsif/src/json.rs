//! JSON forms of catalog entries and automata.

use serde::{Deserialize, Serialize};
use tsif_core::catalog::{constraints, ConstraintSpec, Feature};
use tsif_core::dfa::Dfa;
use tsif_core::register::RegisterAutomaton;
use tsif_core::symbol::Symbol;
use tsif_core::transducer::SeedTransducer;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBoundJson {
    pub c: i64,
    pub d: i64,
    pub m: i64,
    pub k: i64,
    pub guarded: bool,
    pub from_n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub regex: String,
    pub feature: String,
    pub pattern: String,
    pub b: u64,
    pub a: u64,
    pub omega: u64,
    pub trim_source: String,
    pub upper_bound: Option<UpperBoundJson>,
}

impl CatalogEntry {
    pub fn of(spec: &ConstraintSpec) -> CatalogEntry {
        let r = &spec.regex;
        CatalogEntry {
            name: spec.name(),
            regex: r.name.clone(),
            feature: match spec.feature {
                Feature::One => "one".into(),
                Feature::Width => "width".into(),
            },
            pattern: r.pattern.clone(),
            b: r.b_trim,
            a: r.a_trim,
            omega: r.omega,
            trim_source: if r.trims_published { "published" } else { "chosen" }.into(),
            upper_bound: spec.upper.map(|u| UpperBoundJson { c: u.c, d: u.d, m: u.m, k: u.k, guarded: u.guarded, from_n: u.from_n }),
        }
    }
}

pub fn catalog_json() -> Vec<CatalogEntry> {
    constraints().iter().map(CatalogEntry::of).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub symbol: char,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub states: Vec<usize>,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<Edge>,
}

impl DfaJson {
    pub fn of(d: &Dfa) -> DfaJson {
        let mut transitions = Vec::new();
        for (q, row) in d.trans.iter().enumerate() {
            for s in Symbol::ALL {
                if let Some(t) = row[s.index()] {
                    transitions.push(Edge { from: q, symbol: s.as_char(), to: t });
                }
            }
        }
        DfaJson {
            states: (0..d.num_states()).collect(),
            initial: d.initial,
            accepting: (0..d.num_states()).filter(|&q| d.accepting[q]).collect(),
            transitions,
        }
    }

    pub fn to_dfa(&self) -> Option<Dfa> {
        let n = self.states.len();
        let mut trans = vec![[None; 3]; n];
        for e in &self.transitions {
            let s = Symbol::from_char(e.symbol)?;
            if e.from >= n || e.to >= n {
                return None;
            }
            trans[e.from][s.index()] = Some(e.to);
        }
        let mut accepting = vec![false; n];
        for &q in &self.accepting {
            *accepting.get_mut(q)? = true;
        }
        (self.initial < n).then_some(Dfa { trans, initial: self.initial, accepting })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterJson {
    pub name: String,
    pub init: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateJson {
    pub reg: String,
    #[serde(rename = "const")]
    pub constant: u64,
    pub coeffs: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaTransitionJson {
    pub from: String,
    pub symbol: char,
    pub to: String,
    pub updates: Vec<UpdateJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceJson {
    pub coeffs: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterAutomatonJson {
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub registers: Vec<RegisterJson>,
    pub acceptance: AcceptanceJson,
    pub transitions: Vec<RaTransitionJson>,
}

impl RegisterAutomatonJson {
    /// Identity updates are left out.
    pub fn of(ra: &RegisterAutomaton) -> RegisterAutomatonJson {
        let names = &ra.state_names;
        let mut transitions = Vec::new();
        for (q, row) in ra.trans.iter().enumerate() {
            for s in Symbol::ALL {
                let t = &row[s.index()];
                let updates = t
                    .updates
                    .iter()
                    .enumerate()
                    .filter(|(j, u)| !u.is_identity(*j))
                    .map(|(j, u)| UpdateJson { reg: ra.registers[j].name.clone(), constant: u.constant, coeffs: u.coeffs.clone() })
                    .collect();
                transitions.push(RaTransitionJson { from: names[q].clone(), symbol: s.as_char(), to: names[t.to].clone(), updates });
            }
        }
        RegisterAutomatonJson {
            states: names.clone(),
            initial: names[ra.initial].clone(),
            accepting: (0..ra.num_states()).filter(|&q| ra.accepting[q]).map(|q| names[q].clone()).collect(),
            registers: ra.registers.iter().map(|r| RegisterJson { name: r.name.clone(), init: r.init }).collect(),
            acceptance: AcceptanceJson { coeffs: ra.acceptance.clone() },
            transitions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransducerTransitionJson {
    pub from: String,
    pub symbol: char,
    pub to: String,
    pub phase: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransducerJson {
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<TransducerTransitionJson>,
}

impl TransducerJson {
    pub fn of(t: &SeedTransducer) -> TransducerJson {
        let names = &t.state_names;
        let mut transitions = Vec::new();
        for (q, row) in t.trans.iter().enumerate() {
            for s in Symbol::ALL {
                let m = &row[s.index()];
                transitions.push(TransducerTransitionJson {
                    from: names[q].clone(),
                    symbol: s.as_char(),
                    to: names[m.to].clone(),
                    phase: if m.found { "found" } else { "other" }.into(),
                });
            }
        }
        TransducerJson { states: names.clone(), initial: names[t.initial].clone(), transitions }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsif_core::catalog::constraint;

    #[test]
    fn shipped_catalog_matches_builtin() {
        let shipped: Vec<CatalogEntry> = serde_json::from_str(include_str!("../data/catalog.json")).unwrap();
        assert_eq!(shipped, catalog_json());
    }

    #[test]
    fn dfa_roundtrip() {
        let d = constraint("nb_peak").unwrap().regex.dfa();
        let j = DfaJson::of(&d);
        let text = serde_json::to_string(&j).unwrap();
        let back: DfaJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_dfa().unwrap(), d);
    }

    #[test]
    fn register_automaton_shape() {
        let ra = constraint("sum_width_peak").unwrap().register_automaton();
        let j = RegisterAutomatonJson::of(&ra);
        assert_eq!(j.registers.len(), 2);
        assert_eq!(j.transitions.len(), 3 * ra.num_states());
        let v = serde_json::to_value(&j).unwrap();
        assert!(v["transitions"][0]["updates"].is_array());
    }
}
