//! Seeded instances for the demo solver.

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use rayon::prelude::*;
use tsif_core::catalog::ConstraintSpec;
use tsif_core::oracle::Evaluator;
use tsif_core::solver::{DemoSolver, SearchStats};
use tsif_core::symbol::{signature_of, Signature, Symbol, TimeSeries};
use tsif_core::synthesis::LinearInvariant;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoInstance {
    pub seed: u64,
    pub n: u64,
    pub series: TimeSeries,
    pub targets: [u64; 2],
}

/// A uniformly random signature of a length-`n` series and its two results.
pub fn random_instance(specs: [&ConstraintSpec; 2], n: u64, seed: u64) -> DemoInstance {
    let mut rng = StdRng::seed_from_u64(seed);
    let word: Vec<Symbol> = (1..n).map(|_| Symbol::from_index(rng.random_range(0..3))).collect();
    let targets = [Evaluator::new(specs[0]).eval(&word), Evaluator::new(specs[1]).eval(&word)];
    DemoInstance { seed, n, series: Signature(word).to_series(), targets }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoOutcome {
    pub instance: DemoInstance,
    pub off: SearchStats,
    pub on: SearchStats,
    /// Every reported witness reaches the targets, by the oracle.
    pub witnesses_ok: bool,
}

impl DemoOutcome {
    pub fn consistent(&self) -> bool {
        self.witnesses_ok && self.off.solved == self.on.solved && self.on.backtracks <= self.off.backtracks
    }
}

fn witness_ok(specs: [&ConstraintSpec; 2], st: &SearchStats, inst: &DemoInstance) -> bool {
    match &st.witness {
        None => !st.solved,
        Some(w) => {
            let sig = signature_of(w);
            w.len() as u64 == inst.n
                && Evaluator::new(specs[0]).eval(sig.symbols()) == inst.targets[0]
                && Evaluator::new(specs[1]).eval(sig.symbols()) == inst.targets[1]
        }
    }
}

/// Solves each seeded instance with invariants off and on, under the same node budget.
pub fn run_demo(
    specs: [&ConstraintSpec; 2],
    n: u64,
    seeds: impl IntoParallelIterator<Item = u64>,
    records: &[LinearInvariant],
    node_budget: u64,
) -> Vec<DemoOutcome> {
    let solver = DemoSolver::new(specs, n, records);
    seeds
        .into_par_iter()
        .map(|seed| {
            let instance = random_instance(specs, n, seed);
            let off = solver.solve(instance.targets, false, node_budget);
            let on = solver.solve(instance.targets, true, node_budget);
            let witnesses_ok = witness_ok(specs, &off, &instance) && witness_ok(specs, &on, &instance);
            DemoOutcome { instance, off, on, witnesses_ok }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsif_core::catalog::constraint;

    #[test]
    fn instances_are_deterministic() {
        let p = constraint("nb_peak").unwrap();
        let v = constraint("nb_valley").unwrap();
        let a = random_instance([&p, &v], 20, 42);
        assert_eq!(a, random_instance([&p, &v], 20, 42));
        assert_eq!(a.series.len(), 20);
        assert_ne!(a.series, random_instance([&p, &v], 20, 43).series);
    }
}
