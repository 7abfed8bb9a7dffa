//! Graphviz output.

use std::fmt::Write;

use tsif_core::dfa::Dfa;
use tsif_core::digraph::WeightedDigraph;
use tsif_core::register::{RegisterAutomaton, Update};
use tsif_core::symbol::Symbol;
use tsif_core::synthesis::InvariantDigraph;
use tsif_core::transducer::SeedTransducer;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn header(out: &mut String, name: &str, comment: Option<&str>) {
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "// {}", line);
        }
    }
    let _ = writeln!(out, "digraph {} {{\n  rankdir=LR;\n  __start [shape=point];", quote(name));
}

/// Parallel edges between the same states are merged into one labelled edge.
fn merged<T: Clone + PartialEq>(edges: Vec<(usize, usize, T, String)>) -> Vec<(usize, usize, T, String)> {
    let mut out: Vec<(usize, usize, T, String)> = Vec::new();
    for (a, b, extra, label) in edges {
        match out.iter_mut().find(|e| e.0 == a && e.1 == b && e.2 == extra) {
            Some(e) => {
                e.3.push(',');
                e.3.push_str(&label);
            }
            None => out.push((a, b, extra, label)),
        }
    }
    out
}

pub fn dfa_dot(d: &Dfa, name: &str, comment: Option<&str>) -> String {
    let mut out = String::new();
    header(&mut out, name, comment);
    for q in 0..d.num_states() {
        let shape = if d.accepting[q] { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  q{} [label=\"{}\", shape={}];", q, q, shape);
    }
    let _ = writeln!(out, "  __start -> q{};", d.initial);
    let mut edges = Vec::new();
    for (q, row) in d.trans.iter().enumerate() {
        for s in Symbol::ALL {
            if let Some(t) = row[s.index()] {
                edges.push((q, t, (), s.as_char().to_string()));
            }
        }
    }
    for (a, b, _, l) in merged(edges) {
        let _ = writeln!(out, "  q{} -> q{} [label={}];", a, b, quote(&l));
    }
    out.push_str("}\n");
    out
}

fn update_text(ra: &RegisterAutomaton, j: usize, u: &Update) -> String {
    let mut terms: Vec<String> = u
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| if c == 1 { ra.registers[i].name.clone() } else { format!("{}*{}", c, ra.registers[i].name) })
        .collect();
    if u.constant > 0 || terms.is_empty() {
        terms.push(u.constant.to_string());
    }
    format!("{}:={}", ra.registers[j].name, terms.join("+"))
}

pub fn register_automaton_dot(ra: &RegisterAutomaton, name: &str) -> String {
    let mut out = String::new();
    let regs: Vec<String> = ra.registers.iter().map(|r| format!("{}={}", r.name, r.init)).collect();
    header(&mut out, name, Some(&format!("registers: {}", regs.join(", "))));
    for (q, n) in ra.state_names.iter().enumerate() {
        let shape = if ra.accepting[q] { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  q{} [label={}, shape={}];", q, quote(n), shape);
    }
    let _ = writeln!(out, "  __start -> q{};", ra.initial);
    let mut edges = Vec::new();
    for (q, row) in ra.trans.iter().enumerate() {
        for s in Symbol::ALL {
            let t = &row[s.index()];
            let ups: Vec<String> =
                t.updates.iter().enumerate().filter(|(j, u)| !u.is_identity(*j)).map(|(j, u)| update_text(ra, j, u)).collect();
            edges.push((q, t.to, ups.join("; "), s.as_char().to_string()));
        }
    }
    for (a, b, ups, l) in merged(edges) {
        let label = if ups.is_empty() { l } else { format!("{} / {}", l, ups) };
        let _ = writeln!(out, "  q{} -> q{} [label={}];", a, b, quote(&label));
    }
    out.push_str("}\n");
    out
}

pub fn transducer_dot(t: &SeedTransducer, name: &str) -> String {
    let mut out = String::new();
    header(&mut out, name, None);
    for (q, n) in t.state_names.iter().enumerate() {
        let _ = writeln!(out, "  q{} [label={}, shape=circle];", q, quote(n));
    }
    let _ = writeln!(out, "  __start -> q{};", t.initial);
    let mut edges = Vec::new();
    for (q, row) in t.trans.iter().enumerate() {
        for s in Symbol::ALL {
            let m = &row[s.index()];
            edges.push((q, m.to, m.found, s.as_char().to_string()));
        }
    }
    for (a, b, found, l) in merged(edges) {
        let style = if found { ", color=red, fontcolor=red" } else { "" };
        let label = if found { format!("{} / found", l) } else { l };
        let _ = writeln!(out, "  q{} -> q{} [label={}{}];", a, b, quote(&label), style);
    }
    out.push_str("}\n");
    out
}

pub fn weighted_digraph_dot(g: &WeightedDigraph, name: &str, node_names: Option<&[String]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    for v in 0..g.num_nodes {
        let label = node_names.and_then(|n| n.get(v)).cloned().unwrap_or_else(|| v.to_string());
        let _ = writeln!(out, "  v{} [label={}];", v, quote(&label));
    }
    for a in &g.arcs {
        let _ = writeln!(out, "  v{} -> v{} [label=\"{}\"];", a.src, a.dst, a.weight);
    }
    out.push_str("}\n");
    out
}

/// Arcs are labelled with their symbolic weight vector `(e0, e1, ..., ek)`.
pub fn invariant_digraph_dot(dg: &InvariantDigraph, name: &str) -> String {
    let mut out = String::new();
    header(&mut out, name, None);
    for (v, n) in dg.node_names.iter().enumerate() {
        let shape = if dg.accepting[v] { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  v{} [label={}, shape={}];", v, quote(n), shape);
    }
    let _ = writeln!(out, "  __start -> v{};", dg.initial);
    for (a, b, w) in &dg.arcs {
        let ws: Vec<String> = w.iter().map(i64::to_string).collect();
        let _ = writeln!(out, "  v{} -> v{} [label=\"({})\"];", a, b, ws.join(","));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsif_core::catalog::constraint;

    #[test]
    fn dot_outputs_are_well_formed() {
        let c = constraint("nb_peak").unwrap();
        for text in [
            dfa_dot(&c.regex.dfa(), "peak", Some("certificate: proved")),
            register_automaton_dot(&c.register_automaton(), "nb_peak"),
            transducer_dot(&c.transducer(), "peak"),
        ] {
            assert!(text.contains("digraph"));
            assert_eq!(text.matches('{').count(), text.matches('}').count());
            assert!(text.ends_with("}\n"));
        }
        assert!(transducer_dot(&c.transducer(), "peak").contains("color=red"));
        assert!(register_automaton_dot(&c.register_automaton(), "nb_peak").contains(":="));
    }
}
