//! The JSON-lines invariant database.
//!
//! The first line is a header naming the schema; every further non-empty line is one
//! [`InvariantRecord`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tsif_core::facet::FacetStatus;
use tsif_core::mining::{BooleanFunction, NonLinearInvariant, ProofStatus};
use tsif_core::synthesis::{LinearInvariant, Precondition, Sign};

use crate::error::TsifError;

pub const SCHEMA: &str = "tsif-invariants";
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub schema: String,
    pub version: u32,
    pub tool_version: String,
}

impl Default for Header {
    fn default() -> Self {
        Header { schema: SCHEMA.into(), version: SCHEMA_VERSION, tool_version: TOOL_VERSION.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Linear,
    ConditionalLinear,
    NonLinear,
}

/// `e + e0*n + sum r[i]*Ri >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coeffs {
    pub e: i64,
    pub e0: i64,
    pub r: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionPayload {
    /// The conjunction, in the text form accepted by `BooleanFunction::from_str`.
    pub text: String,
    /// The function is false for every series of length at least `n_min`.
    pub n_min: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CertificateField {
    Named(String),
    DeskVerified { desk_verified_to: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetField {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl FacetField {
    pub fn of(st: &FacetStatus) -> FacetField {
        let empty = |status: &str, reason: &str| FacetField {
            status: status.into(),
            cond: None,
            n_min: None,
            points: None,
            reason: Some(reason.into()),
        };
        match st {
            FacetStatus::Facet { cond, n_min, points } => FacetField {
                status: "facet".into(),
                cond: Some(cond.to_string()),
                n_min: Some(*n_min),
                points: Some(points.iter().map(ToString::to_string).collect()),
                reason: None,
            },
            FacetStatus::NotFacet(r) => empty("not_facet", r),
            FacetStatus::Undecided(r) => empty("undecided", r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub kind: RecordKind,
    pub pair: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Coeffs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionPayload>,
    pub precondition: String,
    pub certificate: CertificateField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facet: Option<FacetField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<String>,
    /// Other emitted functions this one implies on the mining box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsumed_by: Option<Vec<String>>,
    pub tool_version: String,
    pub params: BTreeMap<String, String>,
}

fn sign_text(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.as_char()).collect()
}

impl InvariantRecord {
    pub fn linear(inv: &LinearInvariant, params: &BTreeMap<String, String>) -> InvariantRecord {
        let kind = match inv.precondition {
            Precondition::None => RecordKind::Linear,
            _ => RecordKind::ConditionalLinear,
        };
        InvariantRecord {
            kind,
            pair: inv.constraints.clone(),
            coeffs: Some(Coeffs { e: inv.e, e0: inv.e0, r: inv.coeffs.clone() }),
            function: None,
            precondition: inv.precondition.to_string(),
            certificate: CertificateField::Named(if inv.delayed { "theorem2" } else { "theorem1" }.into()),
            facet: None,
            signs: Some(sign_text(&inv.signs)),
            evidence: None,
            subsumed_by: None,
            tool_version: TOOL_VERSION.into(),
            params: params.clone(),
        }
    }

    /// `None` for functions that are not proved.
    pub fn non_linear(inv: &NonLinearInvariant, params: &BTreeMap<String, String>) -> Option<InvariantRecord> {
        let n_min = inv.status.n_min()?;
        let certificate = match &inv.status {
            ProofStatus::DeskVerified { max_n, .. } => CertificateField::DeskVerified { desk_verified_to: *max_n },
            ProofStatus::ProvedWithGuard(_) => CertificateField::Named("proved_with_guard".into()),
            _ => CertificateField::Named("proved".into()),
        };
        Some(InvariantRecord {
            kind: RecordKind::NonLinear,
            pair: inv.pair.to_vec(),
            coeffs: None,
            function: Some(FunctionPayload { text: inv.function.to_string(), n_min }),
            precondition: "none".into(),
            certificate,
            facet: None,
            signs: None,
            evidence: (!inv.evidence.is_empty()).then(|| inv.evidence.clone()),
            subsumed_by: None,
            tool_version: TOOL_VERSION.into(),
            params: params.clone(),
        })
    }

    pub fn to_linear(&self) -> Option<LinearInvariant> {
        let c = self.coeffs.as_ref()?;
        let precondition = match self.precondition.as_str() {
            "none" => Precondition::None,
            "non_default" => Precondition::NonDefault,
            other => Precondition::LengthCond(other.into()),
        };
        let signs = self
            .signs
            .as_deref()
            .unwrap_or("")
            .chars()
            .map(|ch| if ch == '-' { Sign::Minus } else { Sign::Plus })
            .collect();
        let delayed = self.certificate == CertificateField::Named("theorem2".into());
        Some(LinearInvariant {
            e: c.e,
            e0: c.e0,
            coeffs: c.r.clone(),
            precondition,
            constraints: self.pair.clone(),
            signs,
            delayed,
        })
    }

    pub fn to_function(&self) -> Option<(BooleanFunction, u64)> {
        let f = self.function.as_ref()?;
        Some((f.text.parse().ok()?, f.n_min))
    }

    /// Human-readable statement.
    pub fn describe(&self) -> String {
        if let Some(inv) = self.to_linear() {
            let names: Vec<&str> = self.pair.iter().map(String::as_str).collect();
            let pre = if self.precondition == "none" { String::new() } else { format!(" [{}]", self.precondition) };
            return format!("{}{}", inv.render(&names), pre);
        }
        match &self.function {
            Some(f) => format!("not ({}) for n >= {}", f.text, f.n_min),
            None => "(empty record)".into(),
        }
    }

    fn check(&self) -> Result<(), String> {
        match &self.certificate {
            CertificateField::Named(s) if s.is_empty() => return Err("empty certificate".into()),
            _ => {}
        }
        if self.pair.len() < 2 {
            return Err("pair needs two constraint names".into());
        }
        match self.kind {
            RecordKind::NonLinear => {
                if self.to_function().is_none() {
                    return Err("non-linear record needs a parsable function".into());
                }
            }
            _ => match &self.coeffs {
                Some(c) if c.r.len() == self.pair.len() => {}
                _ => return Err("linear record needs one coefficient per constraint".into()),
            },
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Database {
    pub header: Header,
    pub records: Vec<InvariantRecord>,
}

impl Database {
    pub fn new(records: Vec<InvariantRecord>) -> Database {
        Database { header: Header::default(), records }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Database, TsifError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let Some((_, first)) = lines.next() else {
            return Ok(Database::default());
        };
        let header: Header =
            serde_json::from_str(first).map_err(|e| TsifError::Parse { line: 1, message: e.to_string() })?;
        if header.schema != SCHEMA || header.version != SCHEMA_VERSION {
            return Err(TsifError::Parse { line: 1, message: format!("unsupported schema {} v{}", header.schema, header.version) });
        }
        let mut records = Vec::new();
        for (i, line) in lines {
            let r: InvariantRecord =
                serde_json::from_str(line).map_err(|e| TsifError::Parse { line: i + 1, message: e.to_string() })?;
            r.check().map_err(|message| TsifError::Parse { line: i + 1, message })?;
            records.push(r);
        }
        Ok(Database { header, records })
    }
}

pub fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use tsif_core::gap::AtomicRelation;

    fn sample_linear(e: i64, e0: i64, r: Vec<i64>, pre: u8, delayed: bool) -> InvariantRecord {
        let precondition = match pre {
            0 => Precondition::None,
            _ => Precondition::NonDefault,
        };
        let inv = LinearInvariant {
            e,
            e0,
            signs: r.iter().map(|&c| if c < 0 { Sign::Minus } else { Sign::Plus }).collect(),
            constraints: (0..r.len()).map(|i| format!("c{}", i)).collect(),
            coeffs: r,
            precondition,
            delayed,
        };
        InvariantRecord::linear(&inv, &params(&[("coeff_bound", "3".into())]))
    }

    #[test]
    fn example_shape() {
        let mut r = sample_linear(0, 1, vec![-1, -1], 0, false);
        r.pair = vec!["nb_peak".into(), "nb_valley".into()];
        r.facet = Some(FacetField {
            status: "facet".into(),
            cond: Some("n mod 2 = 1".into()),
            n_min: Some(5),
            points: None,
            reason: None,
        });
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(v["kind"], "linear");
        assert_eq!(v["certificate"], "theorem1");
        assert_eq!(v["precondition"], "none");
        assert_eq!(v["coeffs"]["r"], serde_json::json!([-1, -1]));
        assert_eq!(v["facet"]["cond"], "n mod 2 = 1");
    }

    #[test]
    fn parse_errors_name_the_line() {
        let db = Database::new(vec![sample_linear(1, 0, vec![1, -1], 0, false)]);
        let mut text = db.to_jsonl();
        text.push_str("{\"kind\":\"linear\"}\n");
        match Database::parse(&text) {
            Err(TsifError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{:?}", other),
        }
        let mut bad = sample_linear(1, 0, vec![1, -1], 0, false);
        bad.certificate = CertificateField::Named(String::new());
        let text = Database::new(vec![bad]).to_jsonl();
        assert!(Database::parse(&text).is_err());
        assert_eq!(Database::parse("").unwrap().records.len(), 0);
    }

    fn function_record(n_min: u64, desk: Option<u64>) -> InvariantRecord {
        let f = BooleanFunction::new(vec![AtomicRelation::ResEq { which: 0, c: 1 }, AtomicRelation::LenMod { c: 2, d: 0 }]);
        let status = match desk {
            Some(max_n) => ProofStatus::DeskVerified { max_n, n_min },
            None => ProofStatus::ProvedWithGuard(n_min),
        };
        let inv = NonLinearInvariant { function: f, status, evidence: "e".into(), pair: ["a".into(), "b".into()] };
        InvariantRecord::non_linear(&inv, &BTreeMap::new()).unwrap()
    }

    proptest! {
        #[test]
        fn roundtrip_is_byte_identical(
            e in -9i64..9, e0 in -2i64..2, r in prop::collection::vec(-3i64..4, 2..4),
            pre in 0u8..2, delayed: bool, n_min in 1u64..20, desk in prop::option::of(5u64..15),
        ) {
            let db = Database::new(vec![sample_linear(e, e0, r, pre, delayed), function_record(n_min, desk)]);
            let text = db.to_jsonl();
            let back = Database::parse(&text).unwrap();
            prop_assert_eq!(&back, &db);
            prop_assert_eq!(back.to_jsonl(), text);
            let lin = back.records[0].to_linear().unwrap();
            prop_assert_eq!(lin.delayed, delayed);
            prop_assert_eq!(back.records[1].to_function().unwrap().1, n_min);
        }
    }
}
