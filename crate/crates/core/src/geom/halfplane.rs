use num_traits::{Signed, Zero};

use super::{Point, Rational, Vector};

/// Closed half-plane `{x : x·normal <= offset}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlane {
    pub normal: Vector,
    pub offset: Rational,
}

impl HalfPlane {
    pub fn new(normal: Vector, offset: Rational) -> Self {
        HalfPlane { normal, offset }
    }

    /// Signed slack `offset - p·normal`; non-negative inside.
    pub fn slack(&self, p: &Point) -> Rational {
        &self.offset - p.dot(self.normal)
    }

    pub fn contains(&self, p: &Point) -> bool {
        !self.slack(p).is_negative()
    }
}

/// Clips a convex polygon (vertex list, any orientation) by a half-plane.
///
/// The result may contain repeated or collinear vertices; callers that need
/// a clean polygon should run it through [`super::Polygon`] constructors.
pub fn clip(poly: &[Point], hp: &HalfPlane) -> Vec<Point> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let slacks: Vec<Rational> = poly.iter().map(|p| hp.slack(p)).collect();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let j = (k + 1) % n;
        let (a, b) = (&poly[k], &poly[j]);
        let (sa, sb) = (&slacks[k], &slacks[j]);
        if !sa.is_negative() {
            out.push(a.clone());
        }
        if (sa.is_negative() && sb.is_positive()) || (sa.is_positive() && sb.is_negative()) {
            let t = sa / (sa - sb);
            out.push(a.lerp(b, &t));
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Twice the signed area of a closed vertex list.
pub fn convex_area2(poly: &[Point]) -> Rational {
    let n = poly.len();
    let mut acc = Rational::zero();
    for k in 0..n {
        acc += poly[k].cross(&poly[(k + 1) % n]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat;

    fn square() -> Vec<Point> {
        vec![Point::from_ints(0, 0), Point::from_ints(2, 0), Point::from_ints(2, 2), Point::from_ints(0, 2)]
    }

    #[test]
    fn clip_halves_square() {
        let hp = HalfPlane::new(Vector::new(1, 0), rat(1));
        let out = clip(&square(), &hp);
        assert_eq!(convex_area2(&out), rat(4));
    }

    #[test]
    fn clip_to_edge_has_zero_area() {
        let hp = HalfPlane::new(Vector::new(1, 0), rat(0));
        let out = clip(&square(), &hp);
        assert_eq!(convex_area2(&out), rat(0));
        let hp = HalfPlane::new(Vector::new(1, 0), rat(-1));
        assert!(clip(&square(), &hp).is_empty());
    }
}
