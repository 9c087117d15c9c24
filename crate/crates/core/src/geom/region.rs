//! Point and segment location relative to closed polygonal boundaries,
//! which may touch themselves.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::{on_segment, orient, param_on, rat, segment_intersection, Point, Polygon, Rational, SegmentIntersection};

/// Twice the signed area enclosed by a cyclic vertex list.
pub fn signed_area2(cycle: &[Point]) -> Rational {
    super::convex_area2(cycle)
}

pub fn point_on_boundary(cycle: &[Point], p: &Point) -> bool {
    let n = cycle.len();
    (0..n).any(|k| on_segment(&cycle[k], &cycle[(k + 1) % n], p))
}

/// Winding number of the closed boundary around `p`; `p` must not lie on it.
pub fn winding_number(cycle: &[Point], p: &Point) -> i64 {
    let n = cycle.len();
    let mut w = 0;
    for k in 0..n {
        let a = &cycle[k];
        let b = &cycle[(k + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) == Ordering::Greater {
                w += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) == Ordering::Less {
            w -= 1;
        }
    }
    w
}

/// Point in the closure of the region with non-zero winding number.
pub fn point_in_closure(cycle: &[Point], p: &Point) -> bool {
    point_on_boundary(cycle, p) || winding_number(cycle, p) != 0
}

/// Point in the open region (off the boundary, non-zero winding).
pub fn point_in_interior(cycle: &[Point], p: &Point) -> bool {
    !point_on_boundary(cycle, p) && winding_number(cycle, p) != 0
}

/// Cuts `[a, b]` at every boundary point on it; returns ordered points.
pub fn split_by_boundary(cycle: &[Point], a: &Point, b: &Point) -> Vec<Point> {
    let n = cycle.len();
    let mut cuts: Vec<Point> = Vec::new();
    for k in 0..n {
        match segment_intersection(a, b, &cycle[k], &cycle[(k + 1) % n]) {
            SegmentIntersection::None => {}
            SegmentIntersection::Point(p) => cuts.push(p),
            SegmentIntersection::Overlap(p, q) => {
                cuts.push(p);
                cuts.push(q);
            }
        }
    }
    if a == b {
        return vec![a.clone()];
    }
    cuts.retain(|p| p != a && p != b);
    cuts.sort_by_key(|p| param_on(a, b, p));
    cuts.dedup();
    let mut out = vec![a.clone()];
    out.extend(cuts);
    out.push(b.clone());
    out
}

/// Whether the closed segment lies in the closure of the region.
pub fn segment_in_closure(cycle: &[Point], a: &Point, b: &Point) -> bool {
    let pts = split_by_boundary(cycle, a, b);
    pts.iter().all(|p| point_in_closure(cycle, p))
        && pts.windows(2).all(|w| point_in_closure(cycle, &w[0].midpoint(&w[1])))
}

/// Whether the closed segment meets the open region somewhere.
pub fn segment_meets_interior(cycle: &[Point], a: &Point, b: &Point) -> bool {
    let pts = split_by_boundary(cycle, a, b);
    pts.iter().any(|p| point_in_interior(cycle, p))
        || pts.windows(2).any(|w| point_in_interior(cycle, &w[0].midpoint(&w[1])))
}

/// Whether the closed segment `[a, b]` meets the interior of `poly`.
pub fn segment_meets_open_convex(a: &Point, b: &Point, poly: &Polygon) -> bool {
    let ds = poly.ds();
    let mut lo = Rational::zero();
    let mut hi = rat(1);
    for k in 0..ds.len() {
        let n = ds.normal(k);
        // f(t) = (a + t (b - a))·n - p, need f(t) < 0.
        let f0 = a.dot(n) - poly.support(k);
        let slope = b.dot(n) - a.dot(n);
        if slope.is_zero() {
            if !f0.is_negative() {
                return false;
            }
        } else {
            let root = -&f0 / &slope;
            if slope.is_positive() {
                hi = hi.min(root);
            } else {
                lo = lo.max(root);
            }
        }
        if lo > hi {
            return false;
        }
    }
    let mid = (&lo + &hi) / rat(2);
    poly.contains_open(&a.lerp(b, &mid))
}

/// Whether the closures of the segment and the convex polygon meet.
pub fn segment_meets_closed_convex(a: &Point, b: &Point, poly: &Polygon) -> bool {
    let ds = poly.ds();
    let mut lo = Rational::zero();
    let mut hi = rat(1);
    for k in 0..ds.len() {
        let n = ds.normal(k);
        let f0 = a.dot(n) - poly.support(k);
        let slope = b.dot(n) - a.dot(n);
        if slope.is_zero() {
            if f0.is_positive() {
                return false;
            }
        } else {
            let root = -&f0 / &slope;
            if slope.is_positive() {
                hi = hi.min(root);
            } else {
                lo = lo.max(root);
            }
        }
        if lo > hi {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::DirectionSystem;
    use std::sync::Arc;

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()
    }

    #[test]
    fn winding_of_square() {
        let sq = pts(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        assert_eq!(winding_number(&sq, &Point::from_ints(1, 1)), 1);
        assert_eq!(winding_number(&sq, &Point::from_ints(3, 1)), 0);
        assert!(point_on_boundary(&sq, &Point::from_ints(2, 1)));
        assert!(segment_in_closure(&sq, &Point::from_ints(0, 0), &Point::from_ints(2, 2)));
        assert!(!segment_in_closure(&sq, &Point::from_ints(0, 0), &Point::from_ints(3, 2)));
    }

    #[test]
    fn weakly_simple_region() {
        // Two squares joined by a doubled slit along y = 1.
        let c = pts(&[(0, 0), (1, 0), (1, 1), (3, 1), (3, 0), (4, 0), (4, 2), (3, 2), (3, 1), (1, 1), (1, 2), (0, 2)]);
        assert_eq!(winding_number(&c, &Point::new(ratio(1, 2), ratio(1, 2))), 1);
        assert_eq!(winding_number(&c, &Point::new(rat(2), ratio(1, 2))), 0);
        assert!(!segment_in_closure(&c, &Point::from_ints(0, 0), &Point::from_ints(4, 0)));
        assert!(segment_in_closure(&c, &Point::from_ints(1, 1), &Point::from_ints(3, 1)));
        assert!(!segment_meets_interior(&c, &Point::from_ints(1, 1), &Point::from_ints(3, 1)));
    }

    use crate::geom::ratio;

    #[test]
    fn segment_against_convex() {
        let ds = Arc::new(DirectionSystem::axis());
        let sq = Polygon::new(ds, vec![rat(1), rat(1), rat(0), rat(0)]).unwrap();
        let p = Point::from_ints;
        assert!(segment_meets_open_convex(&p(-1, -1), &p(2, 2), &sq));
        assert!(!segment_meets_open_convex(&p(0, 0), &p(0, 1), &sq));
        assert!(!segment_meets_open_convex(&p(-1, 1), &p(1, -1), &sq));
        assert!(segment_meets_closed_convex(&p(-1, 1), &p(1, -1), &sq));
        assert!(!segment_meets_closed_convex(&p(2, 0), &p(3, 0), &sq));
        assert!(segment_meets_open_convex(&p(0, 0), &p(1, 1), &sq));
    }
}
