use std::path::PathBuf;

use tsif::cli::run;
use tsif::db::{CertificateField, Coeffs, Database};

fn tsif(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tsif").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tsif-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn synth_verify_facet_roundtrip() {
    let db = scratch("pv.jsonl");
    let path = db.to_str().unwrap();
    let (code, _, err) = tsif(&["synth", "--pair", "nb_peak,nb_valley", "--out", path]);
    assert_eq!(code, 0);
    assert!(err.contains("4 records"));
    let (code, out, _) = tsif(&["verify", "--db", path, "--max-n", "9"]);
    assert_eq!(code, 0, "{}", out);
    assert!(out.contains("0 violations"));

    let (code, out, _) = tsif(&["facet", "--db", path]);
    assert_eq!(code, 0);
    assert!(out.contains("facet when n mod 2 = 1"), "{}", out);
    let parsed = Database::parse(&std::fs::read_to_string(&db).unwrap()).unwrap();
    let facets = parsed.records.iter().filter(|r| r.facet.as_ref().is_some_and(|f| f.status == "facet")).count();
    assert_eq!(facets, 3);
    assert!(parsed.records.iter().all(|r| r.certificate == CertificateField::Named("theorem1".into())));
}

#[test]
fn injected_false_record_fails_verification() {
    let db = scratch("bad.jsonl");
    let path = db.to_str().unwrap();
    assert_eq!(tsif(&["synth", "--pair", "nb_peak,nb_valley", "--out", path]).0, 0);
    let mut parsed = Database::parse(&std::fs::read_to_string(&db).unwrap()).unwrap();
    let mut bad = parsed.records[0].clone();
    bad.coeffs = Some(Coeffs { e: -3, e0: 1, r: vec![-1, -1] });
    parsed.records.push(bad);
    std::fs::write(&db, parsed.to_jsonl()).unwrap();
    let (code, out, _) = tsif(&["verify", "--db", path, "--max-n", "8"]);
    assert_eq!(code, 1);
    assert!(out.contains("at n=2 <<>"), "{}", out);
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = tsif(&["synth", "--pair", "nb_peak,nb_nothing"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown constraint nb_nothing"));
    assert_eq!(tsif(&["synth", "--pair", "nb_peak"]).0, 2);
    assert_eq!(tsif(&["frobnicate"]).0, 2);
    assert_eq!(tsif(&["prove", "--pair", "nb_peak,nb_valley", "--function", "R7 = 1"]).0, 2);
    assert_eq!(tsif(&["verify", "--db", "/nonexistent/db.jsonl"]).0, 2);
    assert_eq!(tsif(&["--help"]).0, 0);
}

#[test]
fn outputs_are_deterministic() {
    let a = tsif(&["synth", "--pair", "nb_decreasing_terrace,sum_width_increasing_terrace", "--non-default"]);
    let b = tsif(&["synth", "--pair", "nb_decreasing_terrace,sum_width_increasing_terrace", "--non-default"]);
    assert_eq!(a, b);
    assert!(a.1.contains("\"kind\":\"conditional_linear\""));
    let a = tsif(&["demo-solve", "--pair", "nb_decreasing_terrace,nb_increasing_terrace", "--seed", "5", "--instances", "3"]);
    let b = tsif(&["demo-solve", "--pair", "nb_decreasing_terrace,nb_increasing_terrace", "--seed", "5", "--instances", "3"]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
    assert_eq!(a.1.lines().count(), 3);
}

#[test]
fn prove_reports_status() {
    let (code, out, _) = tsif(&["prove", "--pair", "sum_width_decreasing_sequence,sum_width_zigzag", "--function", "R1 mod 2 = 1 and R1 = R2"]);
    assert_eq!(code, 0);
    assert!(out.contains("proved"));
    let (code, out, _) = tsif(&["prove", "--pair", "sum_width_decreasing_sequence,sum_width_zigzag", "--function", "R1 = 2"]);
    assert_eq!(code, 1);
    assert!(out.contains("refuted"));
}

#[test]
fn gap_header_carries_certificate() {
    let (code, out, _) = tsif(&["gap", "--constraint", "nb_peak", "--delta", "1", "--check-to", "10"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certificate"], "proved");
    assert!(v["automaton"]["transitions"].is_array());
    let (code, out, _) = tsif(&["gap", "--constraint", "sum_width_peak", "--delta", "0"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certificate"]["desk_verified_to"], 13);
    let (code, out, _) = tsif(&["gap", "--constraint", "nb_valley", "--delta", "0", "--dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("// nb_valley gap 0"));
}

#[test]
fn mine_writes_records_and_dataset() {
    let db = scratch("mine.jsonl");
    let ds = scratch("dataset.json");
    let (code, _, err) = tsif(&[
        "mine",
        "--pair",
        "sum_width_decreasing_sequence,sum_width_zigzag",
        "--n-lo",
        "7",
        "--n-hi",
        "10",
        "--max-conjuncts",
        "2",
        "--out",
        db.to_str().unwrap(),
        "--dataset",
        ds.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{}", err);
    let parsed = Database::parse(&std::fs::read_to_string(&db).unwrap()).unwrap();
    assert!(parsed.records.iter().any(|r| r.function.as_ref().is_some_and(|f| f.text == "R1 = 1")));
    let slices: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&ds).unwrap()).unwrap();
    assert_eq!(slices.as_array().unwrap().len(), 4);
    assert_eq!(slices[2]["n"], 9);
    assert_eq!(slices[2]["hull"], serde_json::json!([[0, 0], [9, 0], [9, 6], [8, 7], [6, 6]]));
    assert_eq!(slices[2]["infeasible"].as_array().unwrap().len(), 16);
    let (code, out, _) = tsif(&["verify", "--db", db.to_str().unwrap(), "--max-n", "11"]);
    assert_eq!(code, 0, "{}", out);
}

#[test]
fn catalog_and_export() {
    let (code, out, _) = tsif(&["catalog", "check", "--max-len", "7"]);
    assert_eq!(code, 0, "{}", out);
    assert_eq!(out.lines().count(), 8 + 16 * 2);
    let (code, out, _) = tsif(&["catalog", "list", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), include_str!("../data/catalog.json").trim());
    for kind in ["pattern", "register", "transducer", "separated"] {
        let (code, out, _) = tsif(&["export-dot", "--constraint", "nb_peak", "--kind", kind]);
        assert_eq!(code, 0);
        assert!(out.contains("digraph"));
        let (code, out, _) = tsif(&["export-dot", "--constraint", "sum_width_peak", "--kind", kind, "--json"]);
        assert_eq!(code, 0);
        assert!(serde_json::from_str::<serde_json::Value>(&out).is_ok());
    }
    let (code, out, _) = tsif(&["export-dot", "--pair", "nb_peak,nb_valley", "--signs", "+-+"]);
    assert_eq!(code, 0);
    assert!(out.contains("label=\"(") && out.contains("->"), "{}", out);
    assert_eq!(tsif(&["export-dot", "--pair", "nb_peak,nb_valley", "--signs", "+-"]).0, 2);
}
