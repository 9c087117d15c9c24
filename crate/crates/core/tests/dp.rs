use std::sync::Arc;

use misdop::dp::{dp_solve, exact_mis, DpParams};
use misdop::geom::{Point, Polygon};
use misdop::instance::{conflict_graph, default_directions, generate, GenParams};
use misdop::oracle::{guillotine_opt, mis_enumerate};
use misdop::{Error, Instance};
use proptest::prelude::*;

fn rects(r: &[(i64, i64, i64, i64)]) -> Instance {
    let ds = Arc::new(default_directions(2).unwrap());
    let polys = r
        .iter()
        .map(|&(x, y, w, h)| {
            let pts = [Point::from_ints(x, y), Point::from_ints(x + w, y + h)];
            Polygon::hull_of(ds.clone(), &pts).unwrap()
        })
        .collect();
    Instance::new(ds, polys).unwrap()
}

fn rect() -> impl Strategy<Value = (i64, i64, i64, i64)> {
    (0i64..5, 0i64..5, 1i64..3, 1i64..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_matches_enumeration(d in 2usize..=4, n in 1usize..=12, seed in 0u64..10_000) {
        let mut g = GenParams::new(d, n, seed);
        g.coord_range = 10;
        g.independent = false;
        let inst = generate(&g).unwrap();
        let ids = exact_mis(&inst, 20).unwrap();
        prop_assert_eq!(ids.len(), mis_enumerate(&inst).unwrap());
        let graph = conflict_graph(&inst);
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                prop_assert!(!graph.has_edge(a, b));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn guillotine_dp_matches_oracle(r in prop::collection::vec(rect(), 1..=4)) {
        let inst = rects(&r);
        let res = dp_solve(&inst, &DpParams::guillotine()).unwrap();
        prop_assert_eq!(res.ids.len(), guillotine_opt(&inst).unwrap());
        prop_assert!(res.ids.len() <= exact_mis(&inst, 20).unwrap().len());
    }
}

#[test]
fn pinwheel_needs_bent_separators() {
    // Four rectangles around a centre square: no straight cut separates
    // anything without cutting, but two-segment chains do.
    let inst = rects(&[(0, 0, 4, 1), (4, 0, 1, 4), (1, 4, 4, 1), (0, 1, 1, 4), (1, 1, 3, 3)]);
    let exact = exact_mis(&inst, 20).unwrap().len();
    assert_eq!(exact, 5);
    let straight = dp_solve(&inst, &DpParams::guillotine()).unwrap().ids.len();
    assert_eq!(straight, guillotine_opt(&inst).unwrap());
    assert!(straight < exact);
    let params = DpParams { max_fence_segs: 2, max_boundary: 8, budget: 20_000_000, ..DpParams::default() };
    let bent = dp_solve(&inst, &params).unwrap().ids.len();
    assert!(bent > straight && bent <= exact, "bent {bent}, straight {straight}");
}

#[test]
fn budget_and_cap_are_enforced() {
    let inst = rects(&[(0, 0, 1, 1), (2, 2, 1, 1), (0, 3, 2, 1)]);
    let tiny = DpParams { budget: 3, ..DpParams::guillotine() };
    assert!(matches!(dp_solve(&inst, &tiny), Err(Error::BudgetExceeded)));
    assert!(matches!(exact_mis(&inst, 2), Err(Error::TooLarge { n: 3, .. })));
}
