use std::cmp::Ordering;
use std::fmt;

use num_traits::Signed;

use super::{on_segment, orient, param_on, segment_intersection, Point, SegmentIntersection};

/// Directed, possibly degenerate line segment.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub tail: Point,
    pub head: Point,
}

impl Segment {
    pub fn new(tail: Point, head: Point) -> Self {
        Segment { tail, head }
    }

    pub fn is_degenerate(&self) -> bool {
        self.tail == self.head
    }

    pub fn reversed(&self) -> Segment {
        Segment::new(self.head.clone(), self.tail.clone())
    }

    pub fn contains(&self, p: &Point) -> bool {
        on_segment(&self.tail, &self.head, p)
    }

    /// Points strictly between tail and head; empty for degenerate segments.
    pub fn interior_contains(&self, p: &Point) -> bool {
        super::in_segment_interior(&self.tail, &self.head, p)
    }

    pub fn is_vertical(&self) -> bool {
        !self.is_degenerate() && self.tail.x == self.head.x
    }
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}->{:?}", self.tail, self.head)
    }
}

/// Polygonal chain stored by its vertices; consecutive duplicates are
/// dropped, so a single vertex is a degenerate chain.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Chain {
    points: Vec<Point>,
}

impl Chain {
    pub fn new(mut points: Vec<Point>) -> Self {
        points.dedup();
        Chain { points }
    }

    pub fn from_segments(segs: &[Segment]) -> Self {
        let mut pts = Vec::with_capacity(segs.len() + 1);
        for s in segs {
            pts.push(s.tail.clone());
            pts.push(s.head.clone());
        }
        Chain::new(pts)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_segments(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.points.windows(2).map(|w| Segment::new(w[0].clone(), w[1].clone()))
    }

    pub fn tail(&self) -> &Point {
        &self.points[0]
    }

    pub fn head(&self) -> &Point {
        self.points.last().expect("non-empty chain")
    }

    pub fn is_degenerate(&self) -> bool {
        self.points.len() <= 1
    }

    pub fn reversed(&self) -> Chain {
        let mut pts = self.points.clone();
        pts.reverse();
        Chain { points: pts }
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, other: &Chain) -> Chain {
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        Chain::new(pts)
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        match self.points.len() {
            0 => false,
            1 => &self.points[0] == p,
            _ => self.points.windows(2).any(|w| on_segment(&w[0], &w[1], p)),
        }
    }

    /// Whether every point of `other` lies on `self`.
    pub fn covers(&self, other: &Chain) -> bool {
        if other.points.len() == 1 {
            return self.contains_point(&other.points[0]);
        }
        other.segments().all(|s| {
            let sub = split_segment_at(&s, &self.points);
            sub.windows(2).all(|w| self.contains_point(&w[0].midpoint(&w[1])))
                && self.contains_point(&s.tail)
                && self.contains_point(&s.head)
        })
    }

    /// Sub-chain between two points of the chain, given by segment index and
    /// point; `from` must not come after `to`.
    pub fn slice(&self, from: (usize, &Point), to: (usize, &Point)) -> Chain {
        let mut pts = vec![from.1.clone()];
        for k in from.0 + 1..=to.0 {
            pts.push(self.points[k].clone());
        }
        pts.push(to.1.clone());
        Chain::new(pts)
    }

    /// First location of `p` on the chain as (segment index, point).
    pub fn locate(&self, p: &Point) -> Option<usize> {
        if self.points.len() == 1 {
            return (&self.points[0] == p).then_some(0);
        }
        self.points.windows(2).position(|w| on_segment(&w[0], &w[1], p))
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.points).finish()
    }
}

/// Splits a segment at every cut point lying on it; returns ordered points
/// from tail to head.
fn split_segment_at(s: &Segment, cuts: &[Point]) -> Vec<Point> {
    let mut inner: Vec<Point> = cuts.iter().filter(|p| s.interior_contains(p)).cloned().collect();
    inner.sort_by_key(|p| param_on(&s.tail, &s.head, p));
    inner.dedup();
    let mut out = vec![s.tail.clone()];
    out.extend(inner);
    out.push(s.head.clone());
    out.dedup();
    out
}

/// Subdivides `a` at every point where it meets `b`.
fn subdivide(a: &[Point], b: &[Point]) -> Vec<Point> {
    if a.len() < 2 {
        return a.to_vec();
    }
    let mut out = vec![a[0].clone()];
    for w in a.windows(2) {
        let mut cuts: Vec<Point> = b.to_vec();
        for v in b.windows(2) {
            match segment_intersection(&w[0], &w[1], &v[0], &v[1]) {
                SegmentIntersection::None => {}
                SegmentIntersection::Point(p) => cuts.push(p),
                SegmentIntersection::Overlap(p, q) => {
                    cuts.push(p);
                    cuts.push(q);
                }
            }
        }
        let seg = Segment::new(w[0].clone(), w[1].clone());
        let pts = split_segment_at(&seg, &cuts);
        out.extend(pts.into_iter().skip(1));
    }
    out
}

/// Whether `x` lies strictly inside the counterclockwise sector swept from
/// direction `u` to direction `v` (all relative to the origin).
fn in_sector(u: &Point, v: &Point, x: &Point) -> bool {
    let zero = Point::from_ints(0, 0);
    let uv = orient(&zero, u, v);
    let ux = orient(&zero, u, x);
    let xv = orient(&zero, x, v);
    match uv {
        Ordering::Greater => ux == Ordering::Greater && xv == Ordering::Greater,
        Ordering::Less => {
            let vx = orient(&zero, v, x);
            let xu = orient(&zero, x, u);
            let in_closed_complement = vx != Ordering::Less
                && xu != Ordering::Less
                && !(vx == Ordering::Equal && v.inner(x).is_negative())
                && !(xu == Ordering::Equal && u.inner(x).is_negative());
            !in_closed_complement
        }
        Ordering::Equal => {
            if u.inner(v).is_positive() {
                !(ux == Ordering::Equal && u.inner(x).is_positive())
            } else {
                ux == Ordering::Greater
            }
        }
    }
}

/// Side of the point `x` relative to the path `prev -> w -> next`:
/// `true` for left.
fn left_of_path(prev: &Point, w: &Point, next: &Point, x: &Point) -> bool {
    in_sector(&(next - w), &(prev - w), &(x - w))
}

/// Decides whether the chains `a` and `b` cross.
///
/// Both chains are subdivided at their common points. For every maximal
/// piece that `b` shares with `a` (a single vertex or a run of common
/// edges, possibly traversed backwards by `b`) and that stays away from the
/// chain ends, the chains cross there iff `b` arrives on one side of `a` and
/// leaves on the other.
pub fn crossing_detect(a: &Chain, b: &Chain) -> bool {
    if a.points.len() < 2 || b.points.len() < 2 {
        return false;
    }
    let a = subdivide(&a.points, &b.points);
    let b = subdivide(&b.points, &a);
    let na = a.len();
    let nb = b.len();
    let mut s = 0;
    while s < nb {
        let mut next = s + 1;
        for j in (0..na).filter(|&j| a[j] == b[s]) {
            for step in [1isize, -1] {
                // Extend the common run along b from index s.
                let mut e = s;
                let mut je = j as isize;
                while e + 1 < nb {
                    let nj = je + step;
                    if nj < 0 || nj as usize >= na || a[nj as usize] != b[e + 1] {
                        break;
                    }
                    e += 1;
                    je = nj;
                }
                if step == -1 && e == s {
                    continue;
                }
                next = next.max(e + 1);
                let je = je as usize;
                if s == 0 || e + 1 >= nb || j == 0 || j + 1 >= na || je == 0 || je + 1 >= na {
                    continue;
                }
                let side_in = left_of_path(&a[j - 1], &a[j], &a[j + 1], &b[s - 1]);
                let side_out = left_of_path(&a[je - 1], &a[je], &a[je + 1], &b[e + 1]);
                if side_in != side_out {
                    return true;
                }
            }
        }
        s = next;
    }
    false
}

/// Whether a closed boundary (cyclic vertex list without spurs) crosses
/// itself. Shared vertices and shared runs are allowed as long as one strand
/// stays on a single side of the other.
pub fn closed_curve_crosses(cycle: &[Point]) -> bool {
    if cycle.len() < 3 {
        return false;
    }
    let mut closed = cycle.to_vec();
    closed.push(cycle[0].clone());
    let mut p = subdivide(&closed, &closed);
    p.pop();
    p.dedup();
    let m = p.len();
    let at = |k: isize| &p[k.rem_euclid(m as isize) as usize];
    for i in 0..m as isize {
        for j in 0..m as isize {
            if i == j || at(i) != at(j) {
                continue;
            }
            let step: isize = if at(j + 1) == at(i + 1) {
                1
            } else if at(j + 1) == at(i - 1) {
                -1
            } else {
                0
            };
            if step == 0 {
                if at(j - 1) == at(i - 1) || at(j - 1) == at(i + 1) {
                    continue;
                }
            } else if at(j - 1) == at(i - step) {
                continue;
            }
            let (mut e, mut ie) = (j, i);
            let mut len = 0;
            while step != 0 && at(e + 1) == at(ie + step) && len < m {
                e += 1;
                ie += step;
                len += 1;
            }
            if len >= m {
                continue;
            }
            let side_in = left_of_path(at(i - 1), at(i), at(i + 1), at(j - 1));
            let side_out = left_of_path(at(ie - 1), at(ie), at(ie + 1), at(e + 1));
            if side_in != side_out {
                return true;
            }
        }
    }
    false
}

fn is_spur(prev: &Point, w: &Point, next: &Point) -> bool {
    orient(prev, w, next) == Ordering::Equal && (prev - w).inner(&(next - w)).is_positive()
}

/// Repeatedly removes spurs `w' w w''` (a vertex whose two incident edges
/// overlap) from an open chain.
pub fn remove_spurs(c: &Chain) -> Chain {
    let mut pts: Vec<Point> = Vec::with_capacity(c.points.len());
    for p in &c.points {
        pts.push(p.clone());
        loop {
            pts.dedup();
            let n = pts.len();
            if n >= 3 && is_spur(&pts[n - 3], &pts[n - 2], &pts[n - 1]) {
                pts.remove(n - 2);
            } else {
                break;
            }
        }
    }
    Chain::new(pts)
}

/// Spur removal on a closed boundary given as a cyclic vertex list (without
/// the repeated first vertex).
pub fn remove_spurs_closed(cycle: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = cycle.to_vec();
    loop {
        pts.dedup();
        while pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let hit = (0..n).find(|&k| is_spur(&pts[(k + n - 1) % n], &pts[k], &pts[(k + 1) % n]));
        match hit {
            Some(k) => {
                pts.remove(k);
            }
            None => return pts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(v: &[(i64, i64)]) -> Chain {
        Chain::new(v.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    #[test]
    fn simple_crossing() {
        assert!(crossing_detect(&ch(&[(0, 0), (2, 2)]), &ch(&[(0, 2), (2, 0)])));
        assert!(!crossing_detect(&ch(&[(0, 0), (2, 0)]), &ch(&[(0, 1), (2, 1)])));
    }

    #[test]
    fn touching_is_not_crossing() {
        assert!(!crossing_detect(&ch(&[(0, 0), (2, 0)]), &ch(&[(0, 1), (1, 0), (2, 1)])));
        // Shared piece, both ends leave to the same side.
        let a = ch(&[(0, 0), (4, 0)]);
        assert!(!crossing_detect(&a, &ch(&[(0, 1), (1, 0), (3, 0), (4, 1)])));
        assert!(crossing_detect(&a, &ch(&[(0, 1), (1, 0), (3, 0), (4, -1)])));
        assert!(crossing_detect(&a, &ch(&[(4, -1), (3, 0), (1, 0), (0, 1)])));
    }

    #[test]
    fn endpoint_contact_is_not_crossing() {
        assert!(!crossing_detect(&ch(&[(0, 0), (2, 0)]), &ch(&[(1, 0), (1, 2)])));
        assert!(!crossing_detect(&ch(&[(0, 0), (2, 0)]), &ch(&[(2, 0), (3, 1)])));
    }

    #[test]
    fn closed_curves() {
        let pts = |v: &[(i64, i64)]| v.iter().map(|&(x, y)| Point::from_ints(x, y)).collect::<Vec<_>>();
        assert!(!closed_curve_crosses(&pts(&[(0, 0), (2, 0), (2, 2), (0, 2)])));
        assert!(closed_curve_crosses(&pts(&[(0, 0), (2, 2), (2, 0), (0, 2)])));
        // Two squares sharing a corner, traversed as one weakly simple curve.
        assert!(!closed_curve_crosses(&pts(&[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (1, 2), (1, 1), (0, 1)])));
        // Same shape but the second lobe is entered from the wrong side.
        assert!(closed_curve_crosses(&pts(&[(0, 0), (1, 0), (1, 1), (1, 2), (2, 2), (2, 1), (1, 1), (0, 1)])));
        // A slit: boundary runs into the square and back along the same segment.
        assert!(!closed_curve_crosses(&pts(&[(0, 0), (4, 0), (4, 4), (2, 4), (2, 2), (2, 4), (0, 4)])));
    }

    #[test]
    fn spur_removal() {
        let c = remove_spurs(&ch(&[(0, 0), (2, 0), (1, 0), (1, 1)]));
        assert_eq!(c, ch(&[(0, 0), (1, 0), (1, 1)]));
        let straight = ch(&[(0, 0), (1, 0), (2, 0)]);
        assert_eq!(remove_spurs(&straight), straight);
        let nested = remove_spurs(&ch(&[(0, 0), (3, 0), (1, 0), (2, 0)]));
        assert_eq!(nested, ch(&[(0, 0), (1, 0), (2, 0)]));
        assert_eq!(remove_spurs(&nested), nested);
        let closed = remove_spurs_closed(&ch(&[(0, 0), (2, 0), (2, 2), (2, 3), (2, 2), (0, 2)]).points);
        assert_eq!(closed.len(), 4);
    }
}
