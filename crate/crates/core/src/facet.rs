//! Facet analysis of linear invariants over two constraints.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dfa::{intersect_all, min_length_through_cycle, minimize};
use crate::gap::{AtomicRelation, GapError, LengthCondition, RelationContext};
use crate::mining::{upps, Pair};
use crate::synthesis::LinearInvariant;

/// `a * Upp(n) + (1 - 2a) * b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    pub a: u8,
    pub b: i64,
}

impl Coord {
    pub fn value(&self, upp: u64) -> i64 {
        if self.a == 1 {
            upp as i64 - self.b
        } else {
            self.b
        }
    }

    /// The atomic relation pinning register `which` to this coordinate, if it can hold.
    pub fn relation(&self, which: usize) -> Option<AtomicRelation> {
        if self.b < 0 {
            return None;
        }
        let c = self.b as u64;
        Some(if self.a == 1 { AtomicRelation::ResGapEq { which, c } } else { AtomicRelation::ResEq { which, c } })
    }

    fn render(&self, which: usize) -> String {
        match (self.a, self.b) {
            (0, b) => format!("{}", b),
            (_, 0) => format!("Upp{}(n)", which + 1),
            (_, b) if b > 0 => format!("Upp{}(n) - {}", which + 1, b),
            (_, b) => format!("Upp{}(n) + {}", which + 1, -b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointSpec {
    pub x: Coord,
    pub y: Coord,
}

impl PointSpec {
    pub fn at(&self, upp: [u64; 2]) -> (i64, i64) {
        (self.x.value(upp[0]), self.y.value(upp[1]))
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x.render(0), self.y.render(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FacetStatus {
    Facet { cond: LengthCondition, n_min: u64, points: [PointSpec; 2] },
    NotFacet(String),
    Undecided(String),
}

impl fmt::Display for FacetStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FacetStatus::Facet { cond, n_min, points } => {
                write!(f, "facet when {} (n >= {}) through {} and {}", cond, n_min, points[0], points[1])
            }
            FacetStatus::NotFacet(why) => write!(f, "not a facet: {}", why),
            FacetStatus::Undecided(why) => write!(f, "undecided: {}", why),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Residue-class parameters: modulus, and a length beyond which both bounds are affine
/// on every class.
fn class_layout(pair: Pair, cond: &LengthCondition) -> (u64, u64) {
    let mut l = cond.modulus;
    let mut base = cond.min_n.max(2);
    for s in pair {
        let u = s.upper.expect("catalog bound");
        l = lcm(l, u.d.max(1) as u64);
        base = base.max(u.from_n).max(u.c.unsigned_abs() + u.d.unsigned_abs() * (u.k.unsigned_abs() + 1));
    }
    (l, base + 2 * l)
}

fn on_line(inv: &LinearInvariant, n: u64, p: (i64, i64)) -> bool {
    inv.e + inv.e0 * n as i64 + inv.coeffs[0] * p.0 + inv.coeffs[1] * p.1 == 0
}

/// Points on the line `f = 0` whose coordinates have the form `a*Upp(n) + (1-2a)*b`
/// on every residue class admitted by `cond`.
pub fn candidate_points(inv: &LinearInvariant, pair: Pair, cond: &LengthCondition) -> Vec<PointSpec> {
    assert_eq!(inv.coeffs.len(), 2, "facet analysis needs two constraints");
    let (l, base) = class_layout(pair, cond);
    let classes: Vec<u64> = (0..l).filter(|r| r % cond.modulus == cond.residue).collect();
    let (e1, e2) = (inv.coeffs[0], inv.coeffs[1]);
    let mut out = Vec::new();
    for a_x in [1u8, 0] {
        for b_x in 0..=3i64 {
            let x = Coord { a: a_x, b: b_x };
            let mut ys: Option<Vec<Coord>> = None;
            for &r in &classes {
                let n0 = base + (r + l - base % l) % l;
                let samples = [n0, n0 + l];
                let mut rest = [0i64; 2];
                for (i, &n) in samples.iter().enumerate() {
                    rest[i] = -(inv.e + inv.e0 * n as i64 + e1 * x.value(upps(pair, n)[0]));
                }
                let here: Vec<Coord> = if e2 == 0 {
                    if rest == [0, 0] {
                        alloc::vec![Coord { a: 0, b: 0 }, Coord { a: 0, b: 1 }]
                    } else {
                        Vec::new()
                    }
                } else if rest.iter().all(|v| v % e2 == 0) {
                    let y = rest.map(|v| v / e2);
                    let diff = [y[0] - upps(pair, samples[0])[1] as i64, y[1] - upps(pair, samples[1])[1] as i64];
                    if diff[0] == diff[1] {
                        alloc::vec![Coord { a: 1, b: -diff[0] }]
                    } else if y[0] == y[1] {
                        alloc::vec![Coord { a: 0, b: y[0] }]
                    } else {
                        Vec::new()
                    }
                } else {
                    Vec::new()
                };
                ys = Some(match ys {
                    None => here,
                    Some(prev) => prev.into_iter().filter(|c| here.contains(c)).collect(),
                });
            }
            for y in ys.unwrap_or_default() {
                out.push(PointSpec { x, y });
            }
        }
    }
    out
}

/// Smallest `n` from which the point is feasible for every admissible length, if any.
pub fn prove_point_feasible(point: &PointSpec, ctx: &RelationContext, cond: &LengthCondition) -> Result<Option<u64>, GapError> {
    let (Some(rx), Some(ry)) = (point.x.relation(0), point.y.relation(1)) else { return Ok(None) };
    let dfas = [ctx.automaton(&rx)?.dfa, ctx.automaton(&ry)?.dfa, cond.dfa()];
    let inter = minimize(&intersect_all(&dfas));
    Ok(min_length_through_cycle(&inter, cond.smallest_gap() as usize).map(|w| w as u64 + 1))
}

/// Conditions tried in order, from the least restrictive.
pub fn condition_ladder() -> Vec<LengthCondition> {
    let mut out = alloc::vec![LengthCondition::ALL];
    out.extend((2..=6).map(LengthCondition::geq));
    out.extend((0..2).map(|r| LengthCondition::modulo(2, r)));
    for c in 2..=6 {
        for r in 0..2 {
            out.push(LengthCondition::geq(c).and(&LengthCondition::modulo(2, r)).unwrap());
        }
    }
    out
}

/// First admissible length from which both points lie on the line and differ.
fn settle(inv: &LinearInvariant, pair: Pair, cond: &LengthCondition, pts: [PointSpec; 2], from: u64) -> u64 {
    let (l, base) = class_layout(pair, cond);
    let horizon = from.max(base) + 4 * l + 64;
    let mut start = from;
    for n in from..=horizon {
        if !cond.admits(n) {
            continue;
        }
        let u = upps(pair, n);
        let (p, q) = (pts[0].at(u), pts[1].at(u));
        if p == q || !on_line(inv, n, p) || !on_line(inv, n, q) {
            start = n + 1;
        }
    }
    (start..).find(|&n| cond.admits(n)).unwrap()
}

pub fn facet_check(inv: &LinearInvariant, ctx: &mut RelationContext) -> Result<FacetStatus, GapError> {
    if inv.coeffs.len() != 2 {
        return Ok(FacetStatus::Undecided("facet analysis needs two constraints".into()));
    }
    let specs = ctx.specs.clone();
    let pair: Pair = [&specs[0], &specs[1]];
    let ladder = condition_ladder();
    let mut all_rels = Vec::new();
    for cond in &ladder {
        for p in candidate_points(inv, pair, cond) {
            all_rels.extend(p.x.relation(0));
            all_rels.extend(p.y.relation(1));
        }
    }
    ctx.prepare(&all_rels)?;
    for cond in &ladder {
        let mut feasible: Vec<(PointSpec, u64)> = Vec::new();
        for p in candidate_points(inv, pair, cond) {
            if let Some(n) = prove_point_feasible(&p, ctx, cond)? {
                feasible.push((p, n));
            }
        }
        if let [(p, np), (q, nq), ..] = feasible[..] {
            let n_min = settle(inv, pair, cond, [p, q], np.max(nq));
            return Ok(FacetStatus::Facet { cond: *cond, n_min, points: [p, q] });
        }
    }
    Ok(FacetStatus::NotFacet("fewer than two feasible points on the line under every tested condition".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{constraint, ConstraintSpec};
    use crate::mining::feasible_set;
    use crate::synthesis::{synthesize, SynthOptions};

    fn specs(a: &str, b: &str) -> [ConstraintSpec; 2] {
        [constraint(a).unwrap(), constraint(b).unwrap()]
    }

    fn find(invs: &[LinearInvariant], coeffs: [i64; 2], e0: i64) -> LinearInvariant {
        invs.iter().find(|i| i.coeffs == coeffs && i.e0 == e0).cloned().expect("invariant present")
    }

    fn confirm(inv: &LinearInvariant, pair: Pair, st: &FacetStatus) {
        if let FacetStatus::Facet { cond, n_min, points } = st {
            for n in (*n_min).max(5)..=11 {
                if !cond.admits(n) {
                    continue;
                }
                let f = feasible_set(pair, n);
                for p in points {
                    let (x, y) = p.at(upps(pair, n));
                    assert!(f.contains(&(x as u64, y as u64)), "{} n={}", p, n);
                    assert!(on_line(inv, n, (x, y)));
                }
            }
        }
    }

    #[test]
    fn peak_valley_facets() {
        let [p, v] = specs("nb_peak", "nb_valley");
        let pair: Pair = [&p, &v];
        let invs = synthesize(&[p.clone(), v.clone()], SynthOptions::default()).unwrap();
        let sum = find(&invs, [-1, -1], 1);
        let odd = LengthCondition::modulo(2, 1);
        let cands = candidate_points(&sum, pair, &odd);
        let p1 = PointSpec { x: Coord { a: 1, b: 0 }, y: Coord { a: 1, b: 1 } };
        let p2 = PointSpec { x: Coord { a: 1, b: 1 }, y: Coord { a: 1, b: 0 } };
        assert!(cands.contains(&p1) && cands.contains(&p2));
        let mut ctx = RelationContext::new(pair);
        let even = candidate_points(&sum, pair, &LengthCondition::modulo(2, 0));
        let p3 = PointSpec { x: Coord { a: 1, b: 1 }, y: Coord { a: 1, b: -1 } };
        assert!(even.contains(&p3));
        assert_eq!(prove_point_feasible(&p3, &ctx, &LengthCondition::modulo(2, 0)).unwrap(), None);
        assert!(prove_point_feasible(&p2, &ctx, &odd).unwrap().is_some());
        let origin = PointSpec { x: Coord { a: 0, b: 0 }, y: Coord { a: 0, b: 0 } };
        assert_eq!(prove_point_feasible(&origin, &ctx, &LengthCondition::ALL).unwrap(), Some(1));

        let st = facet_check(&sum, &mut ctx).unwrap();
        match &st {
            FacetStatus::Facet { cond, points, .. } => {
                assert_eq!(*cond, odd);
                assert_eq!(*points, [p1, p2]);
            }
            s => panic!("{}", s),
        }
        confirm(&sum, pair, &st);
        let zero = find(&invs, [1, 1], 0);
        assert!(candidate_points(&zero, pair, &LengthCondition::ALL).contains(&origin));
        assert!(matches!(facet_check(&zero, &mut ctx).unwrap(), FacetStatus::NotFacet(_)));
        for inv in &invs {
            confirm(inv, pair, &facet_check(inv, &mut ctx).unwrap());
        }
    }

    #[test]
    fn terrace_facet() {
        let [a, b] = specs("nb_decreasing_terrace", "sum_width_increasing_terrace");
        let pair: Pair = [&a, &b];
        let invs = synthesize(&[a.clone(), b.clone()], SynthOptions::default()).unwrap();
        let inv = find(&invs, [-2, -1], 1);
        assert_eq!(inv.e, -2);
        let mut ctx = RelationContext::new(pair);
        let st = facet_check(&inv, &mut ctx).unwrap();
        assert!(matches!(st, FacetStatus::Facet { .. }), "{}", st);
        confirm(&inv, pair, &st);
    }
}
