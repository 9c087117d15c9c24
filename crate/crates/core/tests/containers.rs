use misdop::charging::{corner_polygons, normalize_to_v1t, ChargingOption};
use misdop::containers::{
    check_structured, fence_between, find_protection, opt_in, verify_witness, Container, FenceCatalog,
};
use misdop::extension::maximal_extension;
use misdop::instance::{generate, GenParams};
use misdop::partitioner::{peel_carriers, peel_corner_polygons};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn box_container_and_seeing_fences(d in 2usize..=4, n in 1usize..=8, seed in 0u64..5000) {
        let mut g = GenParams::new(d, n, seed);
        g.coord_range = 16;
        let ext = maximal_extension(&generate(&g).unwrap()).unwrap().instance;
        let ni = normalize_to_v1t(&ext, ChargingOption::V1_TAIL).unwrap().instance;
        let z = corner_polygons(&ni);
        let catalog = FenceCatalog::new(&ni.polygons, &peel_carriers(&ni, &peel_corner_polygons(&ni, &z)));
        let root = Container::from_convex(&ni.bbox.vertices(), &catalog).unwrap();
        prop_assert!(check_structured(&root, &catalog).is_ok());
        prop_assert!((2..=5).contains(&root.kappa()));
        prop_assert_eq!(opt_in(&root, &ni.polygons), (0..n).collect::<Vec<_>>());
        for p in 0..n {
            for &q in &catalog.seeing.seen[p] {
                let (top, bot) = fence_between(&ni.polygons, p, q, None).unwrap();
                prop_assert!(catalog.recognize(&top.chain).is_some());
                prop_assert!(catalog.recognize(&bot.chain).is_some());
                prop_assert!(top.chain.num_segments() <= 2 * d + 1);
            }
            if let Some(w) = find_protection(p, &root, &catalog) {
                prop_assert!(verify_witness(&w, &root, &catalog));
            }
        }
    }
}
