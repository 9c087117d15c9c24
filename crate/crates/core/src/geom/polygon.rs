use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::chain::{Chain, Segment};
use super::halfplane::{clip, convex_area2, HalfPlane};
use super::{format_rational, line_intersection, DirectionSystem, Point, Rational};
use crate::error::GeomError;

/// A convex polygon whose edges are parallel to the directions of a
/// [`DirectionSystem`], stored by its tight support values.
///
/// The polygon is the open set `{x : x·n_i < p_i for all i}`, where
/// `n_i = v_i^perp`. Edge `e_i` is the (possibly degenerate) intersection of
/// the closure with the line `x·n_i = p_i`.
#[derive(Clone)]
pub struct Polygon {
    ds: Arc<DirectionSystem>,
    supports: Vec<Rational>,
    /// `corners[k]` is the head of `e_k` and the tail of `e_{k+1}`.
    corners: Vec<Point>,
}

impl PartialEq for Polygon {
    fn eq(&self, other: &Self) -> bool {
        self.supports == other.supports && self.ds == other.ds
    }
}

impl Eq for Polygon {}

impl std::hash::Hash for Polygon {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.supports.hash(state);
    }
}

impl Polygon {
    /// Builds the polygon and snaps every support value onto the hull.
    pub fn new(ds: Arc<DirectionSystem>, supports: Vec<Rational>) -> Result<Self, GeomError> {
        let m = ds.len();
        if supports.len() != m {
            return Err(GeomError::SupportCount { expected: m, got: supports.len() });
        }
        let d = ds.d();
        let mut pts = parallelogram(&ds, &supports, 0, 1)?;
        for k in 0..m {
            if k == 0 || k == 1 || k == d || k == d + 1 {
                continue;
            }
            pts = clip(&pts, &HalfPlane::new(ds.normal(k), supports[k].clone()));
            if pts.len() < 3 {
                return Err(GeomError::EmptyInterior);
            }
        }
        if !convex_area2(&pts).is_positive() {
            return Err(GeomError::EmptyInterior);
        }
        let tight: Vec<Rational> = (0..m)
            .map(|k| {
                let n = ds.normal(k);
                pts.iter().map(|p| p.dot(n)).max().expect("non-empty")
            })
            .collect();
        let corners = (0..m)
            .map(|k| {
                let j = (k + 1) % m;
                line_intersection(ds.normal(k), &tight[k], ds.normal(j), &tight[j])
                    .expect("consecutive directions are not parallel")
            })
            .collect();
        Ok(Polygon { ds, supports: tight, corners })
    }

    /// Smallest polygon of the system containing all `points`.
    pub fn hull_of(ds: Arc<DirectionSystem>, points: &[Point]) -> Result<Self, GeomError> {
        if points.is_empty() {
            return Err(GeomError::EmptyInterior);
        }
        let supports = (0..ds.len())
            .map(|k| {
                let n = ds.normal(k);
                points.iter().map(|p| p.dot(n)).max().expect("non-empty")
            })
            .collect();
        Polygon::new(ds, supports)
    }

    pub fn ds(&self) -> &Arc<DirectionSystem> {
        &self.ds
    }

    pub fn supports(&self) -> &[Rational] {
        &self.supports
    }

    pub fn support(&self, i: usize) -> &Rational {
        &self.supports[self.ds.idx(i)]
    }

    pub fn corners(&self) -> &[Point] {
        &self.corners
    }

    /// Head of `e_i` (equivalently the tail of `e_{i+1}`).
    pub fn corner(&self, i: usize) -> &Point {
        &self.corners[self.ds.idx(i)]
    }

    /// Distinct vertices in counterclockwise order, starting at `t(e_1)`.
    pub fn vertices(&self) -> Vec<Point> {
        let m = self.corners.len();
        let mut out: Vec<Point> = Vec::with_capacity(m);
        for k in 0..m {
            let p = &self.corners[(k + m - 1) % m];
            if out.last() != Some(p) {
                out.push(p.clone());
            }
        }
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        out
    }

    pub fn tail(&self, i: usize) -> &Point {
        self.corner(i + self.ds.len() - 1)
    }

    pub fn head(&self, i: usize) -> &Point {
        self.corner(i)
    }

    pub fn edge(&self, i: usize) -> Segment {
        Segment::new(self.tail(i).clone(), self.head(i).clone())
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.tail(i) == self.head(i)
    }

    /// `e_2 … e_d`, running right to left.
    pub fn top_chain(&self) -> Chain {
        let d = self.ds.d();
        Chain::new((0..d).map(|k| self.corners[k].clone()).collect())
    }

    /// `e_{d+2} … e_{2d}`, running left to right.
    pub fn bot_chain(&self) -> Chain {
        let d = self.ds.d();
        Chain::new((d..2 * d).map(|k| self.corners[k].clone()).collect())
    }

    /// Closed boundary `e_1 … e_2d` as a chain from `t(e_1)` back to itself.
    pub fn boundary(&self) -> Chain {
        let mut pts = self.vertices();
        pts.push(pts[0].clone());
        Chain::new(pts)
    }

    pub fn area2(&self) -> Rational {
        convex_area2(&self.vertices())
    }

    pub fn contains_open(&self, p: &Point) -> bool {
        (0..self.ds.len()).all(|k| p.dot(self.ds.normal(k)) < self.supports[k])
    }

    pub fn contains_closed(&self, p: &Point) -> bool {
        (0..self.ds.len()).all(|k| p.dot(self.ds.normal(k)) <= self.supports[k])
    }

    /// Whether the interiors intersect, by the support-value criterion.
    pub fn intersects(&self, other: &Polygon) -> Result<bool, GeomError> {
        self.check_ds(other)?;
        let d = self.ds.d();
        Ok((0..self.ds.len()).all(|i| {
            let j = self.ds.idx(i + d);
            self.supports[i] > -&other.supports[j]
        }))
    }

    /// Interiors are disjoint but the boundaries meet.
    pub fn touches(&self, other: &Polygon) -> Result<bool, GeomError> {
        self.check_ds(other)?;
        let d = self.ds.d();
        let mut strict_everywhere = true;
        for i in 0..self.ds.len() {
            let j = self.ds.idx(i + d);
            let gap = &self.supports[i] + &other.supports[j];
            if gap.is_negative() {
                return Ok(false);
            }
            if gap.is_zero() {
                strict_everywhere = false;
            }
        }
        Ok(!strict_everywhere)
    }

    /// Whether the closure of `self` lies in the closure of `other`.
    pub fn within(&self, other: &Polygon) -> bool {
        self.supports.iter().zip(&other.supports).all(|(a, b)| a <= b)
    }

    fn check_ds(&self, other: &Polygon) -> Result<(), GeomError> {
        if Arc::ptr_eq(&self.ds, &other.ds) || self.ds == other.ds {
            Ok(())
        } else {
            Err(GeomError::DirectionMismatch)
        }
    }
}

fn parallelogram(ds: &DirectionSystem, supports: &[Rational], a: usize, b: usize) -> Result<Vec<Point>, GeomError> {
    let d = ds.d();
    let (a2, b2) = (a + d, b + d);
    if supports[a] <= -&supports[a2] || supports[b] <= -&supports[b2] {
        return Err(GeomError::EmptyInterior);
    }
    let corner = |i: usize, j: usize| {
        line_intersection(ds.normal(i), &supports[i], ds.normal(j), &supports[j]).expect("distinct directions")
    };
    let mut pts = vec![corner(a, b), corner(b, a2), corner(a2, b2), corner(b2, a)];
    if convex_area2(&pts).is_negative() {
        pts.reverse();
    }
    Ok(pts)
}

impl fmt::Debug for Polygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.supports.iter().map(format_rational).collect();
        write!(f, "Polygon[{}]", s.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, Vector};

    fn square(x0: i64, y0: i64, x1: i64, y1: i64) -> Polygon {
        let ds = Arc::new(DirectionSystem::axis());
        Polygon::new(ds, vec![rat(x1), rat(y1), rat(-x0), rat(-y0)]).unwrap()
    }

    #[test]
    fn unit_square_edges() {
        let p = square(0, 0, 1, 1);
        let e1 = p.edge(0);
        assert_eq!(e1.tail, Point::from_ints(1, 0));
        assert_eq!(e1.head, Point::from_ints(1, 1));
        assert_eq!(
            p.vertices(),
            vec![Point::from_ints(1, 0), Point::from_ints(1, 1), Point::from_ints(0, 1), Point::from_ints(0, 0)]
        );
        assert_eq!(p.edge(4), p.edge(0));
        assert_eq!(p.area2(), rat(2));
    }

    #[test]
    fn octagon_with_redundant_constraint() {
        let ds = Arc::new(
            DirectionSystem::new(&[Vector::new(0, 1), Vector::new(-1, 1), Vector::new(-1, 0), Vector::new(-1, -1)])
                .unwrap(),
        );
        // Square [0,2]^2 with its upper right corner cut off and a redundant
        // lower-left constraint.
        let p = Polygon::new(ds, vec![rat(2), rat(3), rat(2), rat(2), rat(0), rat(5), rat(0), rat(2)]).unwrap();
        assert_eq!(p.support(5), &rat(0));
        let degenerate: Vec<usize> = (0..8).filter(|&i| p.is_degenerate(i)).collect();
        assert_eq!(degenerate, vec![3, 5, 7]);
        assert_eq!(p.vertices().len(), 5);
        assert_eq!(p.edge(1).tail, Point::from_ints(2, 1));
        assert_eq!(p.edge(1).head, Point::from_ints(1, 2));
    }

    #[test]
    fn empty_is_rejected() {
        let ds = Arc::new(DirectionSystem::axis());
        assert!(matches!(
            Polygon::new(ds.clone(), vec![rat(0), rat(1), rat(0), rat(0)]),
            Err(GeomError::EmptyInterior)
        ));
        assert!(Polygon::new(ds, vec![rat(1), rat(1), rat(0)]).is_err());
    }

    #[test]
    fn intersect_and_touch() {
        let a = square(0, 0, 1, 1);
        let b = square(2, 0, 3, 1);
        let c = square(1, 0, 2, 1);
        let e = square(1, 1, 2, 2);
        assert!(!a.intersects(&b).unwrap());
        assert!(a.intersects(&a).unwrap());
        assert!(a.touches(&c).unwrap());
        assert!(a.touches(&e).unwrap());
        assert!(!a.touches(&b).unwrap());
        assert!(!a.touches(&a).unwrap());
    }

    #[test]
    fn chains() {
        let p = square(0, 0, 1, 1);
        assert_eq!(p.top_chain().points(), &[Point::from_ints(1, 1), Point::from_ints(0, 1)]);
        assert_eq!(p.bot_chain().points(), &[Point::from_ints(0, 0), Point::from_ints(1, 0)]);
    }
}
