//! Parallel drivers around the core algorithms, producing database records.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use tsif_core::catalog::{constraint, ConstraintSpec};
use tsif_core::facet::facet_check;
use tsif_core::gap::{AtomicRelation, GapError, RelationContext};
use tsif_core::mining::{
    dataset_from, dominance_filter, enumerate_hypotheses, feasible_set, implies_on_box, is_consistent, prove_levelwise,
    HypothesisBounds, MiningReport, NonLinearInvariant, Pair, ProofContext,
};
use tsif_core::synthesis::{synthesize, SynthOptions};

use crate::db::{params, FacetField, InvariantRecord};
use crate::error::TsifError;

/// Caps the global thread pool at `TSIF_THREADS` when set. Safe to call more than once.
pub fn configure_threads() -> Result<(), TsifError> {
    if let Ok(v) = std::env::var("TSIF_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| TsifError::Usage(format!("TSIF_THREADS must be a number, got `{}`", v)))?;
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    Ok(())
}

pub fn parse_pair(text: &str) -> Result<[ConstraintSpec; 2], TsifError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts[..] {
        [a, b] => Ok([constraint(a)?, constraint(b)?]),
        _ => Err(TsifError::Usage(format!("expected two comma-separated constraint names, got `{}`", text))),
    }
}

pub fn synth_records(specs: &[ConstraintSpec; 2], opts: SynthOptions) -> Result<Vec<InvariantRecord>, TsifError> {
    let invs = synthesize(specs, opts)?;
    let p = params(&[
        ("coeff_bound", opts.bound.to_string()),
        ("delayed", opts.delayed.to_string()),
        ("non_default", opts.non_default.to_string()),
    ]);
    Ok(invs.iter().map(|i| InvariantRecord::linear(i, &p)).collect())
}

/// Default, delayed and non-default invariants for every unordered pair of catalog constraints.
pub fn all_pair_records(names: &[String]) -> Result<Vec<InvariantRecord>, TsifError> {
    let mut jobs = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            for (delayed, non_default) in [(false, false), (true, false), (false, true)] {
                jobs.push((a.clone(), b.clone(), SynthOptions { delayed, non_default, ..SynthOptions::default() }));
            }
        }
    }
    let out: Result<Vec<Vec<InvariantRecord>>, TsifError> =
        jobs.par_iter().map(|(a, b, o)| synth_records(&[constraint(a)?, constraint(b)?], *o)).collect();
    Ok(out?.into_iter().flatten().collect())
}

pub fn mine_parallel(pair: Pair, n_lo: u64, n_hi: u64, bounds: &HypothesisBounds) -> Result<MiningReport, GapError> {
    let feasible: BTreeMap<u64, BTreeSet<(u64, u64)>> =
        (n_lo..=n_hi).into_par_iter().map(|n| (n, feasible_set(pair, n))).collect();
    let dataset = dataset_from(pair, &feasible);
    let hyps = enumerate_hypotheses(bounds);
    let consistent: Vec<_> = hyps.par_iter().filter(|f| is_consistent(f, &dataset)).cloned().collect();
    let used: BTreeSet<AtomicRelation> = consistent.iter().flat_map(|f| f.conjuncts.iter().copied()).collect();
    let pc = ProofContext::new(pair, &used.into_iter().collect::<Vec<_>>())?;
    let (all, skipped) = prove_levelwise(&consistent, |level| level.par_iter().map(|f| pc.prove(f)).collect());
    let proved: Vec<NonLinearInvariant> = all.into_iter().filter(|p| p.status.is_proved()).collect();
    let final_set = dominance_filter(&proved);
    Ok(MiningReport { dataset, hypotheses: hyps.len(), consistent: consistent.len(), skipped, proved, final_set })
}

/// Records for the final set; each lists the other emitted functions it implies on the box.
pub fn mining_records(pair: Pair, report: &MiningReport, n_lo: u64, n_hi: u64, bounds: &HypothesisBounds) -> Vec<InvariantRecord> {
    let p = params(&[
        ("n_lo", n_lo.to_string()),
        ("n_hi", n_hi.to_string()),
        ("max_const", bounds.max_const.to_string()),
        ("max_conjuncts", bounds.max_conjuncts.to_string()),
    ]);
    report
        .final_set
        .par_iter()
        .filter_map(|inv| {
            let mut rec = InvariantRecord::non_linear(inv, &p)?;
            let by: Vec<String> = report
                .final_set
                .iter()
                .filter(|g| g.function != inv.function && implies_on_box(pair, &inv.function, &g.function, n_lo, n_hi))
                .map(|g| g.function.to_string())
                .collect();
            rec.subsumed_by = (!by.is_empty()).then_some(by);
            Some(rec)
        })
        .collect()
}

/// Sets the facet field of every unconditional two-constraint linear record.
pub fn annotate_facets(records: &mut [InvariantRecord]) -> Result<usize, TsifError> {
    let mut groups: BTreeMap<Vec<String>, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        if r.coeffs.as_ref().is_some_and(|c| c.r.len() == 2) && r.precondition == "none" {
            groups.entry(r.pair.clone()).or_default().push(i);
        }
    }
    let done: Vec<(usize, FacetField)> = groups
        .into_par_iter()
        .map(|(pair, idx)| {
            let specs = [constraint(&pair[0])?, constraint(&pair[1])?];
            let mut ctx = RelationContext::new([&specs[0], &specs[1]]);
            let mut out = Vec::new();
            for i in idx {
                let inv = records[i].to_linear().expect("linear record");
                out.push((i, FacetField::of(&facet_check(&inv, &mut ctx)?)));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, TsifError>>()?
        .into_iter()
        .flatten()
        .collect();
    let n = done.len();
    for (i, f) in done {
        records[i].facet = Some(f);
    }
    Ok(n)
}
