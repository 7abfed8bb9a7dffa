//! Weighted multidigraphs: shortest paths and elementary circuits.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub src: usize,
    pub dst: usize,
    pub weight: i64,
    pub tag: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightedDigraph {
    pub num_nodes: usize,
    pub arcs: Vec<Arc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShortestPaths {
    Distances(Vec<Option<i64>>),
    /// Arc indices of a negative cycle, in walk order.
    NegativeCycle(Vec<usize>),
}

pub const CIRCUIT_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooManyCircuits;

impl core::fmt::Display for TooManyCircuits {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "more than {} simple circuits", CIRCUIT_LIMIT)
    }
}

impl WeightedDigraph {
    pub fn new(num_nodes: usize) -> WeightedDigraph {
        WeightedDigraph { num_nodes, arcs: Vec::new() }
    }

    pub fn add_arc(&mut self, src: usize, dst: usize, weight: i64, tag: usize) {
        self.arcs.push(Arc { src, dst, weight, tag });
    }

    pub fn cycle_weight(&self, arcs: &[usize]) -> i64 {
        arcs.iter().map(|&a| self.arcs[a].weight).sum()
    }
}

pub fn bellman_ford(g: &WeightedDigraph, source: usize) -> ShortestPaths {
    let n = g.num_nodes;
    let mut dist: Vec<Option<i64>> = vec![None; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    dist[source] = Some(0);
    let mut last = None;
    for _ in 0..n {
        last = None;
        for (i, a) in g.arcs.iter().enumerate() {
            if let Some(d) = dist[a.src] {
                let nd = d + a.weight;
                if dist[a.dst].is_none_or(|x| nd < x) {
                    dist[a.dst] = Some(nd);
                    pred[a.dst] = Some(i);
                    last = Some(a.dst);
                }
            }
        }
        if last.is_none() {
            return ShortestPaths::Distances(dist);
        }
    }
    // Still relaxing after n rounds: walk predecessors back onto the cycle.
    let mut v = last.unwrap();
    for _ in 0..n {
        v = g.arcs[pred[v].unwrap()].src;
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let a = pred[v].unwrap();
        cycle.push(a);
        v = g.arcs[a].src;
        if v == start {
            break;
        }
    }
    cycle.reverse();
    ShortestPaths::NegativeCycle(cycle)
}

fn sccs(adj: &[Vec<usize>], allowed: &[bool]) -> Vec<usize> {
    // Tarjan, iterative; returns component ids (usize::MAX for excluded nodes).
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for s in 0..n {
        if !allowed[s] || index[s] != usize::MAX {
            continue;
        }
        let mut work = vec![(s, 0usize)];
        index[s] = counter;
        low[s] = counter;
        counter += 1;
        stack.push(s);
        on[s] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if !allowed[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on[w] = true;
                    work.push((w, 0));
                } else if on[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(p, _)) = work.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

struct Johnson<'a> {
    adj: &'a [Vec<usize>],
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    bsets: Vec<Vec<usize>>,
    path: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: usize) {
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            if self.blocked[x] {
                self.blocked[x] = false;
                stack.extend(core::mem::take(&mut self.bsets[x]));
            }
        }
    }

    fn circuit(&mut self, v: usize, s: usize) -> Result<bool, TooManyCircuits> {
        let mut found = false;
        self.path.push(v);
        self.blocked[v] = true;
        for i in 0..self.adj[v].len() {
            let w = self.adj[v][i];
            if !self.allowed[w] {
                continue;
            }
            if w == s {
                self.out.push(self.path.clone());
                if self.out.len() > CIRCUIT_LIMIT {
                    return Err(TooManyCircuits);
                }
                found = true;
            } else if !self.blocked[w] && self.circuit(w, s)? {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for i in 0..self.adj[v].len() {
                let w = self.adj[v][i];
                if self.allowed[w] && !self.bsets[w].contains(&v) {
                    self.bsets[w].push(v);
                }
            }
        }
        self.path.pop();
        Ok(found)
    }
}

/// Elementary circuits of the underlying simple digraph, as node sequences (Johnson).
pub fn simple_node_circuits(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>, TooManyCircuits> {
    let mut adj = vec![Vec::new(); num_nodes];
    for &(a, b) in edges {
        if !adj[a].contains(&b) {
            adj[a].push(b);
        }
    }
    for row in &mut adj {
        row.sort_unstable();
    }
    let mut j = Johnson {
        adj: &adj,
        allowed: vec![false; num_nodes],
        blocked: vec![false; num_nodes],
        bsets: vec![Vec::new(); num_nodes],
        path: Vec::new(),
        out: Vec::new(),
    };
    for s in 0..num_nodes {
        let allowed: Vec<bool> = (0..num_nodes).map(|v| v >= s).collect();
        let comp = sccs(&adj, &allowed);
        j.allowed = (0..num_nodes).map(|v| v >= s && comp[v] == comp[s]).collect();
        for v in s..num_nodes {
            j.blocked[v] = false;
            j.bsets[v].clear();
        }
        j.circuit(s, s)?;
    }
    Ok(j.out)
}

/// Every elementary circuit exactly once, as arc-index sequences; parallel arcs give
/// distinct circuits.
pub fn simple_circuits(g: &WeightedDigraph) -> Result<Vec<Vec<usize>>, TooManyCircuits> {
    let edges: Vec<(usize, usize)> = g.arcs.iter().map(|a| (a.src, a.dst)).collect();
    let mut out = Vec::new();
    for cyc in simple_node_circuits(g.num_nodes, &edges)? {
        let choices: Vec<Vec<usize>> = (0..cyc.len())
            .map(|i| {
                let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
                (0..g.arcs.len()).filter(|&k| g.arcs[k].src == a && g.arcs[k].dst == b).collect()
            })
            .collect();
        let mut idx = vec![0usize; choices.len()];
        loop {
            out.push(idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect());
            if out.len() > CIRCUIT_LIMIT {
                return Err(TooManyCircuits);
            }
            let mut p = 0;
            while p < idx.len() {
                idx[p] += 1;
                if idx[p] < choices[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == idx.len() {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let g = WeightedDigraph::new(1);
        assert_eq!(bellman_ford(&g, 0), ShortestPaths::Distances(vec![Some(0)]));
        let mut dag = WeightedDigraph::new(3);
        dag.add_arc(0, 1, 1, 0);
        dag.add_arc(1, 2, 1, 1);
        assert!(simple_circuits(&dag).unwrap().is_empty());
        let mut two = WeightedDigraph::new(1);
        two.add_arc(0, 0, 1, 0);
        two.add_arc(0, 0, 2, 1);
        assert_eq!(simple_circuits(&two).unwrap().len(), 2);
    }

    #[test]
    fn negative_cycle_witness() {
        let mut g = WeightedDigraph::new(3);
        g.add_arc(0, 1, 1, 0);
        g.add_arc(1, 2, -3, 1);
        g.add_arc(2, 0, 1, 2);
        match bellman_ford(&g, 0) {
            ShortestPaths::NegativeCycle(c) => {
                assert_eq!(c.len(), 3);
                assert_eq!(g.cycle_weight(&c), -1);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn complete_graph_circuit_count() {
        // K4 with self-loops: 4 loops + 6 two-cycles + 8 three-cycles + 6 four-cycles.
        let mut g = WeightedDigraph::new(4);
        for a in 0..4 {
            for b in 0..4 {
                g.add_arc(a, b, 0, 0);
            }
        }
        assert_eq!(simple_circuits(&g).unwrap().len(), 24);
    }
}
