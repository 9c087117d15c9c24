use misdop::extension::{check_extension, maximal_extension, EventKind};
use misdop::instance::{conflict_graph, generate, GenParams};

fn corpus(d: usize, seeds: u64) -> impl Iterator<Item = misdop::Instance> {
    (0..seeds).map(move |seed| {
        let mut g = GenParams::new(d, 1 + (seed as usize % 12), seed);
        g.coord_range = 16;
        generate(&g).unwrap()
    })
}

#[test]
fn random_extensions_satisfy_postconditions() {
    for d in 2..=4 {
        let mut fallbacks = 0;
        let mut max_level = 0;
        for inst in corpus(d, 40) {
            let res = maximal_extension(&inst).unwrap();
            let rep = check_extension(&res);
            assert!(rep.ok(), "d={d}: {:?}", rep.failures);
            fallbacks += res.fallbacks;
            max_level = max_level.max(rep.max_level);
            for (a, b) in inst.polygons.iter().zip(&res.instance.polygons) {
                assert!(a.area2() <= b.area2());
            }
            let again = maximal_extension(&res.instance).unwrap();
            assert_eq!(again.instance, res.instance, "extension is not idempotent");
            assert_eq!(conflict_graph(&res.instance).num_edges(), 0);
        }
        eprintln!("d={d} fallbacks={fallbacks} max_level={max_level}");
    }
}

#[test]
fn adjacent_squares_stop_at_each_other() {
    let inst = misdop::instance::parse("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 2\npoly 1 1 0 0\npoly 5 1 -3 0\n").unwrap();
    let res = maximal_extension(&inst).unwrap();
    let first = &res.log[0];
    assert_eq!(first.kind, EventKind::S2);
    assert_eq!(first.witness, Some(misdop::extension::Witness::Polygon(1)));
}
