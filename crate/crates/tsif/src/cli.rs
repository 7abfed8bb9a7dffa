//! The `tsif` command line. Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use tsif_core::catalog::{constraint, constraints, Feature};
use tsif_core::gap::{gap_automaton, verify_gap_automata, Certificate};
use tsif_core::mining::{BooleanFunction, HypothesisBounds, ProofContext};
use tsif_core::oracle::{brute_force_upper, Evaluator};
use tsif_core::symbol::enumerate_signatures;
use tsif_core::synthesis::{build_product, invariant_digraph, LinearInvariant, Sign, SynthOptions};
use tsif_core::transducer::validate_transducer;

use crate::db::Database;
use crate::demo::run_demo;
use crate::dot;
use crate::error::TsifError;
use crate::json::{catalog_json, DfaJson, RegisterAutomatonJson, TransducerJson};
use crate::pipeline::{all_pair_records, annotate_facets, configure_threads, mine_parallel, mining_records, parse_pair, synth_records};
use crate::verify::verify_database;

#[derive(Parser, Debug)]
#[command(name = "tsif", version, about = "Invariant synthesis and proofs for time-series constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect or check the built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Synthesize linear invariants for a pair.
    Synth {
        #[arg(long, required_unless_present = "all_pairs")]
        pair: Option<String>,
        /// Every unordered pair of catalog constraints, in default, delayed and non-default mode.
        #[arg(long, conflicts_with = "pair")]
        all_pairs: bool,
        #[arg(long)]
        delayed: bool,
        #[arg(long)]
        non_default: bool,
        #[arg(long, default_value_t = 3)]
        coeff_bound: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mine and prove non-linear invariants.
    Mine {
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 7)]
        n_lo: u64,
        #[arg(long, default_value_t = 12)]
        n_hi: u64,
        #[arg(long, default_value_t = 3)]
        max_conjuncts: usize,
        #[arg(long, default_value_t = 5)]
        max_const: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the generated dataset as JSON.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Prove that a Boolean function never holds.
    Prove {
        #[arg(long)]
        pair: String,
        /// Conjunction such as "R1 mod 2 = 1 and R1 = R2".
        #[arg(long)]
        function: String,
    },
    /// Add facet status to the linear records of a database, in place.
    Facet {
        #[arg(long)]
        db: PathBuf,
    },
    /// Build a gap automaton.
    Gap {
        #[arg(long)]
        constraint: String,
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        dot: bool,
        /// Also compare with the gap oracle up to this length.
        #[arg(long)]
        check_to: Option<u64>,
    },
    /// Check a database against the brute-force oracle.
    Verify {
        #[arg(long)]
        db: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_n: u64,
    },
    /// Run the demo solver on seeded instances, with and without invariants.
    DemoSolve {
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 20)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        instances: u64,
        #[arg(long, default_value_t = 10_000_000)]
        node_budget: u64,
    },
    /// Graphviz output for catalog automata or an invariant digraph.
    ExportDot {
        #[arg(long, required_unless_present = "pair")]
        constraint: Option<String>,
        #[arg(long, value_enum, default_value_t = DotKind::Register)]
        kind: DotKind,
        /// Export the invariant digraph of a pair instead.
        #[arg(long, conflicts_with = "constraint", requires = "signs")]
        pair: Option<String>,
        /// Sign vector such as "+--" for the digraph.
        #[arg(long)]
        signs: Option<String>,
        /// Print the JSON form of the automaton instead.
        #[arg(long, conflicts_with = "pair")]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List {
        #[arg(long)]
        json: bool,
    },
    Check {
        #[arg(long, default_value_t = 9)]
        max_len: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DotKind {
    Pattern,
    Register,
    Transducer,
    Separated,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Failed,
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e) } else { write!(out, "{}", e) };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {}", e);
        return e.exit_code();
    }
    match execute(cli.command, out, err) {
        Ok(Status::Ok) => 0,
        Ok(Status::Failed) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            e.exit_code()
        }
    }
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), TsifError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_db(path: &Path) -> Result<Database, TsifError> {
    let text = std::fs::read_to_string(path).map_err(|e| TsifError::Usage(format!("{}: {}", path.display(), e)))?;
    Database::parse(&text)
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status, TsifError> {
    match cmd {
        Command::Catalog { action: CatalogAction::List { json: true } } => {
            writeln!(out, "{}", serde_json::to_string_pretty(&catalog_json()).expect("catalog serializes"))?;
            Ok(Status::Ok)
        }
        Command::Catalog { action: CatalogAction::List { json: false } } => {
            for c in constraints() {
                let u = c.upper.expect("catalog bound");
                let base = match u.c {
                    0 => "n".to_string(),
                    c => format!("n - {}", c),
                };
                let body = if u.d == 1 { base } else { format!("floor(({}) / {})", base, u.d) };
                let guard = if u.from_n > 1 { format!(" for n >= {}, else 0", u.from_n) } else { String::new() };
                writeln!(out, "{:<30} {:<26} Upp(n) = max(0, {}){}", c.name(), c.regex.pattern, body, guard)?;
            }
            Ok(Status::Ok)
        }
        Command::Catalog { action: CatalogAction::Check { max_len } } => catalog_check(max_len, out),
        Command::Synth { pair, all_pairs, delayed, non_default, coeff_bound, out: path } => {
            let records = if all_pairs {
                let names: Vec<String> = constraints().iter().map(|c| c.name()).collect();
                all_pair_records(&names)?
            } else {
                let specs = parse_pair(pair.as_deref().unwrap_or_default())?;
                synth_records(&specs, SynthOptions { delayed, non_default, bound: coeff_bound })?
            };
            writeln!(err, "{} records", records.len())?;
            write_output(path.as_deref(), &Database::new(records).to_jsonl(), out)?;
            Ok(Status::Ok)
        }
        Command::Mine { pair, n_lo, n_hi, max_conjuncts, max_const, out: path, dataset } => {
            if n_lo < 2 || n_lo > n_hi {
                return Err(TsifError::Usage("need 2 <= n-lo <= n-hi".into()));
            }
            let specs = parse_pair(&pair)?;
            let p = [&specs[0], &specs[1]];
            let bounds = HypothesisBounds { max_const, max_conjuncts, ..HypothesisBounds::default() };
            let report = mine_parallel(p, n_lo, n_hi, &bounds)?;
            writeln!(
                err,
                "{} hypotheses, {} consistent, {} proved, {} kept",
                report.hypotheses,
                report.consistent,
                report.proved.len(),
                report.final_set.len()
            )?;
            if let Some(ds) = dataset {
                let slices: Vec<_> = report
                    .dataset
                    .slices
                    .iter()
                    .map(|s| json!({"n": s.n, "feasible": s.feasible, "hull": s.hull, "infeasible": s.infeasible}))
                    .collect();
                std::fs::write(ds, serde_json::to_string(&slices).expect("dataset serializes"))?;
            }
            let records = mining_records(p, &report, n_lo, n_hi, &bounds);
            write_output(path.as_deref(), &Database::new(records).to_jsonl(), out)?;
            Ok(Status::Ok)
        }
        Command::Prove { pair, function } => {
            let specs = parse_pair(&pair)?;
            let f: BooleanFunction = function.parse().map_err(|e| TsifError::Usage(format!("{}", e)))?;
            let pc = ProofContext::new([&specs[0], &specs[1]], &f.conjuncts)?;
            let r = pc.prove(&f);
            writeln!(out, "{}: {}", f, r.status)?;
            if !r.evidence.is_empty() {
                writeln!(out, "  {}", r.evidence)?;
            }
            Ok(if r.status.is_proved() { Status::Ok } else { Status::Failed })
        }
        Command::Facet { db } => {
            let mut database = read_db(&db)?;
            let n = annotate_facets(&mut database.records)?;
            std::fs::write(&db, database.to_jsonl())?;
            writeln!(err, "annotated {} records", n)?;
            for r in database.records.iter().filter(|r| r.facet.is_some()) {
                let f = r.facet.as_ref().unwrap();
                writeln!(out, "{}: {}{}", r.describe(), f.status, f.cond.as_ref().map(|c| format!(" when {}", c)).unwrap_or_default())?;
            }
            Ok(Status::Ok)
        }
        Command::Gap { constraint: name, delta, dot: as_dot, check_to } => {
            let spec = constraint(&name)?;
            let g = gap_automaton(&spec, delta)?;
            let cert = match g.certificate {
                Certificate::Proved => json!("proved"),
                Certificate::DeskVerified(n) => json!({ "desk_verified_to": n }),
            };
            let mut status = Status::Ok;
            if let Some(max_n) = check_to {
                if let Err(e) = verify_gap_automata(&spec, &[(delta, &g.dfa)], max_n) {
                    writeln!(err, "oracle mismatch: {}", e)?;
                    status = Status::Failed;
                }
            }
            if as_dot {
                let comment = format!("{} gap {}\ncertificate: {}", name, delta, cert);
                write!(out, "{}", dot::dfa_dot(&g.dfa, &format!("{}_gap_{}", name, delta), Some(&comment)))?;
            } else {
                let v = json!({
                    "constraint": name,
                    "delta": delta,
                    "certificate": cert,
                    "raw_states": g.raw_states,
                    "automaton": DfaJson::of(&g.dfa),
                });
                writeln!(out, "{}", v)?;
            }
            Ok(status)
        }
        Command::Verify { db, max_n } => {
            let database = read_db(&db)?;
            let rep = verify_database(&database, None, max_n)?;
            writeln!(out, "{} records, {} signatures, {} checks, {} violations", rep.records, rep.signatures, rep.checks, rep.violations.len())?;
            for v in &rep.violations {
                let r = &database.records[v.record];
                writeln!(
                    out,
                    "violation: {} on {} at n={} <{}> results {:?} ({} signatures)",
                    r.describe(),
                    r.pair.join(","),
                    v.n,
                    v.witness,
                    v.results,
                    v.count
                )?;
            }
            Ok(if rep.passed() { Status::Ok } else { Status::Failed })
        }
        Command::DemoSolve { pair, n, seed, instances, node_budget } => {
            let specs = parse_pair(&pair)?;
            let invs: Vec<LinearInvariant> = tsif_core::synthesis::synthesize(&specs, SynthOptions::default())?;
            let outcomes = run_demo([&specs[0], &specs[1]], n, seed..seed + instances, &invs, node_budget);
            let mut ok = true;
            for o in &outcomes {
                ok &= o.consistent();
                let stats = |s: &tsif_core::solver::SearchStats| json!({"solved": s.solved, "nodes": s.nodes, "backtracks": s.backtracks, "exhausted": s.exhausted});
                let line = json!({
                    "seed": o.instance.seed,
                    "n": n,
                    "targets": o.instance.targets,
                    "series": o.instance.series.values(),
                    "off": stats(&o.off),
                    "on": stats(&o.on),
                    "consistent": o.consistent(),
                });
                writeln!(out, "{}", line)?;
            }
            Ok(if ok { Status::Ok } else { Status::Failed })
        }
        Command::ExportDot { constraint: name, kind, pair, signs, json } => {
            if let Some(pair) = pair {
                let specs = parse_pair(&pair)?;
                let signs = parse_signs(signs.as_deref().unwrap_or_default())?;
                let ras = [specs[0].register_automaton(), specs[1].register_automaton()];
                let names = [specs[0].name(), specs[1].name()];
                let p = build_product(&[(names[0].as_str(), &ras[0]), (names[1].as_str(), &ras[1])], SynthOptions::default());
                if signs.len() != p.k() + 1 {
                    return Err(TsifError::Usage(format!("need {} signs", p.k() + 1)));
                }
                write!(out, "{}", dot::invariant_digraph_dot(&invariant_digraph(&p, &signs), &names.join("_x_")))?;
                return Ok(Status::Ok);
            }
            let spec = constraint(name.as_deref().unwrap_or_default())?;
            if json {
                let v = match kind {
                    DotKind::Pattern => serde_json::to_value(DfaJson::of(&spec.regex.dfa())),
                    DotKind::Register => serde_json::to_value(RegisterAutomatonJson::of(&spec.register_automaton())),
                    DotKind::Transducer => serde_json::to_value(TransducerJson::of(&spec.transducer())),
                    DotKind::Separated => serde_json::to_value(TransducerJson::of(&spec.separated_transducer())),
                };
                writeln!(out, "{}", v.expect("automaton serializes"))?;
                return Ok(Status::Ok);
            }
            let text = match kind {
                DotKind::Pattern => dot::dfa_dot(&spec.regex.dfa(), &spec.regex.name, Some(&spec.regex.pattern)),
                DotKind::Register => dot::register_automaton_dot(&spec.register_automaton(), &spec.name()),
                DotKind::Transducer => dot::transducer_dot(&spec.transducer(), &spec.regex.name),
                DotKind::Separated => dot::transducer_dot(&spec.separated_transducer(), &spec.regex.name),
            };
            write!(out, "{}", text)?;
            Ok(Status::Ok)
        }
    }
}

fn parse_signs(s: &str) -> Result<Vec<Sign>, TsifError> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(TsifError::Usage(format!("bad sign `{}`", c))),
        })
        .collect()
}

#[derive(Serialize)]
struct CheckLine<'a> {
    name: &'a str,
    check: &'a str,
    passed: bool,
}

fn catalog_check(max_len: usize, out: &mut dyn Write) -> Result<Status, TsifError> {
    let mut ok = true;
    let mut line = |name: &str, check: &str, passed: bool, out: &mut dyn Write| -> Result<(), TsifError> {
        ok &= passed;
        writeln!(out, "{}", serde_json::to_string(&CheckLine { name, check, passed }).expect("line serializes"))?;
        Ok(())
    };
    for c in constraints() {
        if c.feature == Feature::One {
            let rep = validate_transducer(&c.transducer(), &c.regex.dfa(), max_len);
            line(&c.regex.name, "transducer", rep.passed(), out)?;
        }
        let ra = c.register_automaton();
        let ev = Evaluator::new(&c);
        let ra_ok = (0..=max_len.min(8)).all(|l| enumerate_signatures(l).all(|s| ra.run_sig(&s).result == ev.eval(s.symbols())));
        line(&c.name(), "register_automaton", ra_ok, out)?;
        let ub_ok = (1..=10).all(|n| c.upp(n) == brute_force_upper(&c, n));
        line(&c.name(), "upper_bound", ub_ok, out)?;
    }
    Ok(if ok { Status::Ok } else { Status::Failed })
}

pub fn main_with_args() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
