use std::sync::Arc;

use misdop::geom::{
    closed_curve_crosses, crossing_detect, format_decimal, format_rational, parse_rational, ratio, Chain,
    DirectionSystem, Point, Polygon, Vector,
};
use misdop::instance::default_directions;
use misdop::oracle::intersect_oracle;
use proptest::prelude::*;

fn system(d: usize) -> Arc<DirectionSystem> {
    Arc::new(default_directions(d).unwrap())
}

fn polygon(d: usize) -> impl Strategy<Value = Polygon> {
    (0i64..10, 0i64..10, prop::collection::vec(1i64..5, 2 * d)).prop_map(move |(x, y, r)| {
        let ds = system(d);
        let c = Point::from_ints(x, y);
        let supports = (0..2 * d).map(|k| c.dot(ds.normal(k)) + misdop::geom::rat(r[k])).collect();
        Polygon::new(ds, supports).unwrap()
    })
}

fn pair() -> impl Strategy<Value = (Polygon, Polygon)> {
    (2usize..=4).prop_flat_map(|d| (polygon(d), polygon(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn intersects_matches_vertex_oracle((p, q) in pair()) {
        let fast = p.intersects(&q).unwrap();
        prop_assert_eq!(fast, intersect_oracle(&p, &q));
        prop_assert_eq!(fast, q.intersects(&p).unwrap());
        if p.touches(&q).unwrap() {
            prop_assert!(!fast);
        }
    }

    #[test]
    fn tightened_supports_touch_the_hull(p in (2usize..=4).prop_flat_map(polygon)) {
        let ds = p.ds().clone();
        let vs = p.vertices();
        for k in 0..ds.len() {
            let best = vs.iter().map(|v| v.dot(ds.normal(k))).max().unwrap();
            prop_assert_eq!(&best, p.support(k));
        }
        prop_assert_eq!(Polygon::hull_of(ds, &vs).unwrap(), p.clone());
        prop_assert!(p.within(&p));
    }

    #[test]
    fn rational_text_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let r = ratio(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&r)), Some(r.clone()));
        let shown: f64 = format_decimal(&r, 9).parse().unwrap();
        prop_assert!((shown - n as f64 / d as f64).abs() <= 1e-9);
    }
}

#[test]
fn direction_system_rejects_bad_bases() {
    assert!(DirectionSystem::new(&[Vector::new(0, 1), Vector::new(1, 0)]).is_err());
    assert!(DirectionSystem::new(&[Vector::new(0, 1), Vector::new(-1, 0), Vector::new(-2, 0)]).is_err());
    assert!(DirectionSystem::new(&[Vector::new(0, 1), Vector::new(-1, 1)]).is_ok());
    let ds = system(3);
    for k in 0..ds.len() {
        assert_eq!(ds.dir(ds.opposite(k)), Vector::new(-ds.dir(k).x, -ds.dir(k).y));
    }
}

#[test]
fn empty_polygon_is_rejected() {
    let ds = system(2);
    let r = misdop::geom::rat;
    assert!(Polygon::new(ds.clone(), vec![r(1), r(1), r(-1), r(0)]).is_err());
    assert!(Polygon::new(ds, vec![r(1), r(1)]).is_err());
}

#[test]
fn crossing_and_touching_chains() {
    let p = Point::from_ints;
    let a = Chain::new(vec![p(0, 0), p(2, 2)]);
    let b = Chain::new(vec![p(0, 2), p(2, 0)]);
    assert!(crossing_detect(&a, &b));
    // Touching at a shared vertex without passing through is no crossing.
    let c = Chain::new(vec![p(0, 0), p(1, 1), p(2, 0)]);
    let e = Chain::new(vec![p(0, 2), p(1, 1), p(2, 2)]);
    assert!(!crossing_detect(&c, &e));
    let bow = [p(0, 0), p(2, 2), p(2, 0), p(0, 2)];
    assert!(closed_curve_crosses(&bow));
    assert!(!closed_curve_crosses(&[p(0, 0), p(2, 0), p(2, 2), p(0, 2)]));
}
