//! Exact planar geometry for d-directional convex polygons.
//!
//! Every coordinate is a [`Rational`]; no predicate in this module ever
//! rounds.

mod chain;
mod direction;
mod halfplane;
mod polygon;
mod region;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub use chain::{closed_curve_crosses, crossing_detect, remove_spurs, remove_spurs_closed, Chain, Segment};
pub use direction::{DirectionSystem, Vector};
pub use halfplane::{clip, convex_area2, HalfPlane};
pub use polygon::Polygon;
pub use region::{
    point_in_closure, point_in_interior, point_on_boundary, segment_in_closure, segment_meets_closed_convex,
    segment_meets_interior, segment_meets_open_convex, signed_area2, split_by_boundary, winding_number,
};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Writes `n` or `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n` or `n/d` (the inverse of [`format_rational`]).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Decimal rendering rounded half up to `places` digits, trailing zeros
/// dropped. Only used for display.
pub fn format_decimal(r: &Rational, places: u32) -> String {
    let scale = BigInt::from(10).pow(places);
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let n = (r * Rational::from_integer(scale.clone()) + half).floor().to_integer();
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let places = places as usize;
    let padded = format!("{:0>width$}", digits, width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    let frac = frac.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(rat(x), rat(y))
    }

    /// Inner product with an integer vector.
    pub fn dot(&self, v: Vector) -> Rational {
        &self.x * BigInt::from(v.x) + &self.y * BigInt::from(v.y)
    }

    pub fn cross(&self, other: &Point) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn inner(&self, other: &Point) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn scale(&self, s: &Rational) -> Point {
        Point::new(&self.x * s, &self.y * s)
    }

    /// Point on the segment `self -> other` at parameter `t`.
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        Point::new(&self.x + (&other.x - &self.x) * t, &self.y + (&other.y - &self.y) * t)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let half = ratio(1, 2);
        Point::new((&self.x + &other.x) * &half, (&self.y + &other.y) * &half)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Approximate coordinates, for rendering only.
    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

impl<'a> Sub<&'a Point> for &'a Point {
    type Output = Point;
    fn sub(self, rhs: &'a Point) -> Point {
        Point::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl<'a> Add<&'a Point> for &'a Point {
    type Output = Point;
    fn add(self, rhs: &'a Point) -> Point {
        Point::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

/// Sign of the turn `a -> b -> c`: `Greater` for counterclockwise.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Ordering {
    let u = b - a;
    let v = c - a;
    u.cross(&v).cmp(&Rational::zero())
}

/// Whether `p` lies on the closed segment `[a, b]`.
pub fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    if orient(a, b, p) != Ordering::Equal {
        return false;
    }
    let lo_x = a.x.clone().min(b.x.clone());
    let hi_x = a.x.clone().max(b.x.clone());
    let lo_y = a.y.clone().min(b.y.clone());
    let hi_y = a.y.clone().max(b.y.clone());
    p.x >= lo_x && p.x <= hi_x && p.y >= lo_y && p.y <= hi_y
}

/// Whether `p` lies on the open segment `(a, b)`; false for degenerate segments.
pub fn in_segment_interior(a: &Point, b: &Point, p: &Point) -> bool {
    a != b && p != a && p != b && on_segment(a, b, p)
}

/// Parameter of `p` along `a -> b`, assuming `p` is on the supporting line.
pub fn param_on(a: &Point, b: &Point, p: &Point) -> Rational {
    let d = b - a;
    if d.x.abs() >= d.y.abs() {
        (&p.x - &a.x) / &d.x
    } else {
        (&p.y - &a.y) / &d.y
    }
}

/// Intersection of the closed segments `[a, b]` and `[c, d]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentIntersection {
    None,
    Point(Point),
    Overlap(Point, Point),
}

pub fn segment_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> SegmentIntersection {
    if a == b {
        return if on_segment(c, d, a) { SegmentIntersection::Point(a.clone()) } else { SegmentIntersection::None };
    }
    if c == d {
        return if on_segment(a, b, c) { SegmentIntersection::Point(c.clone()) } else { SegmentIntersection::None };
    }
    let r = b - a;
    let s = d - c;
    let denom = r.cross(&s);
    let ca = c - a;
    if denom.is_zero() {
        if !ca.cross(&r).is_zero() {
            return SegmentIntersection::None;
        }
        // Collinear: project c and d onto a -> b.
        let rr = r.inner(&r);
        let t0 = ca.inner(&r) / &rr;
        let t1 = (d - a).inner(&r) / &rr;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let lo = lo.max(Rational::zero());
        let hi = hi.min(rat(1));
        return match lo.cmp(&hi) {
            Ordering::Greater => SegmentIntersection::None,
            Ordering::Equal => SegmentIntersection::Point(a.lerp(b, &lo)),
            Ordering::Less => SegmentIntersection::Overlap(a.lerp(b, &lo), a.lerp(b, &hi)),
        };
    }
    let t = ca.cross(&s) / &denom;
    let u = ca.cross(&r) / &denom;
    let zero = Rational::zero();
    let one = rat(1);
    if t < zero || t > one || u < zero || u > one {
        return SegmentIntersection::None;
    }
    SegmentIntersection::Point(a.lerp(b, &t))
}

/// Intersection point of two non-parallel lines `n1·x = c1`, `n2·x = c2`.
pub fn line_intersection(n1: Vector, c1: &Rational, n2: Vector, c2: &Rational) -> Option<Point> {
    let det = n1.x * n2.y - n1.y * n2.x;
    if det == 0 {
        return None;
    }
    let det = Rational::from_integer(BigInt::from(det));
    let x = (c1 * BigInt::from(n2.y) - c2 * BigInt::from(n1.y)) / &det;
    let y = (c2 * BigInt::from(n1.x) - c1 * BigInt::from(n2.x)) / &det;
    Some(Point::new(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_roundtrip() {
        for s in ["0", "-3", "7/2", "-5/12"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(format_decimal(&ratio(1, 3), 9), "0.333333333");
        assert_eq!(format_decimal(&ratio(2, 3), 9), "0.666666667");
        assert_eq!(format_decimal(&ratio(-7, 2), 9), "-3.5");
        assert_eq!(format_decimal(&rat(12), 9), "12");
        assert_eq!(format_decimal(&ratio(-1, 3_000_000_000), 9), "0");
        assert_eq!(format_decimal(&ratio(-1, 300_000_000), 9), "-0.000000003");
    }

    #[test]
    fn segment_intersection_cases() {
        let p = Point::from_ints;
        assert_eq!(segment_intersection(&p(0, 0), &p(2, 2), &p(0, 2), &p(2, 0)), SegmentIntersection::Point(p(1, 1)));
        assert_eq!(
            segment_intersection(&p(0, 0), &p(2, 0), &p(1, 0), &p(3, 0)),
            SegmentIntersection::Overlap(p(1, 0), p(2, 0))
        );
        assert_eq!(segment_intersection(&p(0, 0), &p(1, 0), &p(1, 0), &p(3, 0)), SegmentIntersection::Point(p(1, 0)));
        assert_eq!(segment_intersection(&p(0, 0), &p(1, 0), &p(0, 1), &p(1, 1)), SegmentIntersection::None);
    }
}
