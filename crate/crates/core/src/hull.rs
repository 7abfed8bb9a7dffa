//! Convex hulls of lattice points with exact integer arithmetic.

use alloc::vec::Vec;

pub type Point = (i64, i64);

fn cross(o: Point, a: Point, b: Point) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist2(a: Point, b: Point) -> i64 {
    (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)
}

/// Counterclockwise hull starting from the lowest (then leftmost) point, without
/// collinear points. Collinear input gives the two endpoints.
pub fn graham_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 1 {
        return pts;
    }
    let pivot = *pts.iter().min_by_key(|p| (p.1, p.0)).unwrap();
    pts.retain(|&p| p != pivot);
    pts.sort_by(|&a, &b| {
        let c = cross(pivot, a, b);
        if c > 0 {
            core::cmp::Ordering::Less
        } else if c < 0 {
            core::cmp::Ordering::Greater
        } else {
            dist2(pivot, a).cmp(&dist2(pivot, b))
        }
    });
    let mut stack: Vec<Point> = alloc::vec![pivot];
    for p in pts {
        while stack.len() >= 2 && cross(stack[stack.len() - 2], stack[stack.len() - 1], p) <= 0 {
            stack.pop();
        }
        stack.push(p);
    }
    // Points collinear with the pivot on the closing edge can survive the scan.
    while stack.len() >= 3 && cross(stack[stack.len() - 2], stack[stack.len() - 1], pivot) <= 0 {
        stack.pop();
    }
    stack
}

/// Inside or on the boundary of a convex counterclockwise polygon.
pub fn contains(hull: &[Point], p: Point) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0] == p,
        2 => {
            cross(hull[0], hull[1], p) == 0
                && p.0 >= hull[0].0.min(hull[1].0)
                && p.0 <= hull[0].0.max(hull[1].0)
                && p.1 >= hull[0].1.min(hull[1].1)
                && p.1 <= hull[0].1.max(hull[1].1)
        }
        n => (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= 0),
    }
}

/// Lattice points in the bounding box of the hull that lie inside or on it.
pub fn lattice_points(hull: &[Point]) -> Vec<Point> {
    if hull.is_empty() {
        return Vec::new();
    }
    let (x0, x1) = (hull.iter().map(|p| p.0).min().unwrap(), hull.iter().map(|p| p.0).max().unwrap());
    let (y0, y1) = (hull.iter().map(|p| p.1).min().unwrap(), hull.iter().map(|p| p.1).max().unwrap());
    let mut out = Vec::new();
    for x in x0..=x1 {
        for y in y0..=y1 {
            if contains(hull, (x, y)) {
                out.push((x, y));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(graham_hull(&[(0, 0), (2, 0), (1, 1)]), [(0, 0), (2, 0), (1, 1)]);
        assert_eq!(graham_hull(&[(0, 0), (1, 0), (2, 0)]), [(0, 0), (2, 0)]);
        assert_eq!(graham_hull(&[(3, 4)]), [(3, 4)]);
        assert_eq!(graham_hull(&[(0, 0), (1, 1), (2, 2), (1, 1)]), [(0, 0), (2, 2)]);
        let sq = graham_hull(&[(0, 0), (2, 0), (2, 2), (0, 2), (1, 1), (1, 0), (0, 1)]);
        assert_eq!(sq, [(0, 0), (2, 0), (2, 2), (0, 2)]);
        assert!(contains(&sq, (1, 2)) && contains(&sq, (1, 1)) && !contains(&sq, (3, 1)));
        assert_eq!(lattice_points(&sq).len(), 9);
    }

    proptest! {
        #[test]
        fn hull_contains_input_and_vertices_are_input(pts in prop::collection::vec((-6i64..7, -6i64..7), 1..30)) {
            let h = graham_hull(&pts);
            for p in &pts {
                prop_assert!(contains(&h, *p));
            }
            for v in &h {
                prop_assert!(pts.contains(v));
            }
            let n = h.len();
            if n >= 3 {
                for i in 0..n {
                    prop_assert!(cross(h[i], h[(i + 1) % n], h[(i + 2) % n]) > 0);
                }
            }
        }
    }
}
