//! Exhaustive checking of a database against the brute-force oracle.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use tsif_core::catalog::{constraint, ConstraintSpec};
use tsif_core::oracle::Evaluator;
use tsif_core::symbol::{enumerate_signatures, Signature};

use crate::db::Database;
use crate::error::TsifError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index into the database records.
    pub record: usize,
    /// Shortest, then lexicographically least, violating signature.
    pub witness: Signature,
    pub n: u64,
    pub results: Vec<u64>,
    /// Violating signatures in total.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub records: usize,
    pub signatures: u64,
    pub checks: u64,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Oracle results of one constraint, per signature length, in enumeration order.
pub struct ResultTable {
    pub by_len: Vec<Vec<u64>>,
}

impl ResultTable {
    pub fn new(spec: &ConstraintSpec, max_len: usize) -> ResultTable {
        let ev = Evaluator::new(spec);
        ResultTable { by_len: (0..=max_len).map(|l| enumerate_signatures(l).map(|s| ev.eval(s.symbols())).collect()).collect() }
    }
}

pub fn result_tables(names: &BTreeSet<String>, max_len: usize) -> Result<BTreeMap<String, ResultTable>, TsifError> {
    let specs = names.iter().map(|n| Ok((n.clone(), constraint(n)?))).collect::<Result<Vec<_>, TsifError>>()?;
    Ok(specs.into_par_iter().map(|(n, s)| (n, ResultTable::new(&s, max_len))).collect())
}

/// Checks every record (restricted to `pairs` when given) on every signature of a
/// series of length at most `n_max`. Linear records are checked from length 2.
pub fn verify_database(db: &Database, pairs: Option<&[[String; 2]]>, n_max: u64) -> Result<VerifyReport, TsifError> {
    let selected: Vec<usize> = (0..db.records.len())
        .filter(|&i| pairs.is_none_or(|ps| ps.iter().any(|p| db.records[i].pair[..2] == p[..])))
        .collect();
    let names: BTreeSet<String> = selected.iter().flat_map(|&i| db.records[i].pair.iter().cloned()).collect();
    let max_len = n_max.saturating_sub(1) as usize;
    let tables = result_tables(&names, max_len)?;
    let specs: BTreeMap<&String, ConstraintSpec> = names.iter().map(|n| (n, constraint(n).unwrap())).collect();

    let per_record: Vec<(u64, Option<Violation>)> = selected
        .par_iter()
        .map(|&i| {
            let rec = &db.records[i];
            let cols: Vec<&ResultTable> = rec.pair.iter().map(|n| &tables[n]).collect();
            let linear = rec.to_linear();
            let function = rec.to_function();
            let mut checks = 0;
            let mut first: Option<Violation> = None;
            let mut count = 0;
            for len in 0..=max_len {
                let n = len as u64 + 1;
                let upp = [specs[&rec.pair[0]].upp(n), specs[&rec.pair[1]].upp(n)];
                for idx in 0..cols[0].by_len[len].len() {
                    let results: Vec<u64> = cols.iter().map(|c| c.by_len[len][idx]).collect();
                    checks += 1;
                    let ok = match (&linear, &function) {
                        (Some(inv), _) => inv.holds(n, &results),
                        (None, Some((f, n_min))) => n < *n_min || !f.eval(n, [results[0], results[1]], upp),
                        _ => true,
                    };
                    if !ok {
                        count += 1;
                        if first.is_none() {
                            let witness = enumerate_signatures(len).nth(idx).unwrap();
                            first = Some(Violation { record: i, witness, n, results, count: 0 });
                        }
                    }
                }
            }
            (checks, first.map(|v| Violation { count, ..v }))
        })
        .collect();

    Ok(VerifyReport {
        records: selected.len(),
        signatures: (0..=max_len as u32).map(|l| 3u64.pow(l)).sum(),
        checks: per_record.iter().map(|p| p.0).sum(),
        violations: per_record.into_iter().filter_map(|p| p.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db::{params, InvariantRecord};
    use tsif_core::synthesis::{synthesize, SynthOptions};

    fn peak_valley_db() -> Database {
        let specs = [constraint("nb_peak").unwrap(), constraint("nb_valley").unwrap()];
        let invs = synthesize(&specs, SynthOptions::default()).unwrap();
        Database::new(invs.iter().map(|i| InvariantRecord::linear(i, &params(&[]))).collect())
    }

    #[test]
    fn synthesized_database_passes() {
        let db = peak_valley_db();
        assert_eq!(db.records.len(), 4);
        let rep = verify_database(&db, None, 10).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.signatures, (0..10).map(|l| 3u64.pow(l)).sum::<u64>());
        assert_eq!(rep.checks, 4 * rep.signatures);
    }

    #[test]
    fn injected_record_gets_minimal_witness() {
        let mut db = peak_valley_db();
        let mut bad = db.records[0].clone();
        // P + V <= n - 3
        bad.coeffs = Some(crate::db::Coeffs { e: -3, e0: 1, r: vec![-1, -1] });
        db.records.push(bad);
        let rep = verify_database(&db, None, 8).unwrap();
        assert_eq!(rep.violations.len(), 1);
        let v = &rep.violations[0];
        assert_eq!(v.record, 4);
        // Already false at n = 2, where both results are 0.
        assert_eq!(v.n, 2);
        assert_eq!(v.witness.to_string(), "<");
        assert_eq!(v.results, [0, 0]);
        assert!(v.count >= 3);
    }

    #[test]
    fn empty_database_passes() {
        let rep = verify_database(&Database::default(), None, 10).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.checks, 0);
    }
}
