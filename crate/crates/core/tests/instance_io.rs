use misdop::instance::{conflict_graph, generate, parse, serialize, GenParams};
use misdop::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_parse_round_trip(d in 2usize..=4, n in 1usize..=12, seed in 0u64..10_000, independent: bool) {
        let mut g = GenParams::new(d, n, seed);
        g.independent = independent;
        let inst = generate(&g).unwrap();
        let text = serialize(&inst);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize(&back), text);
        if independent {
            prop_assert_eq!(conflict_graph(&inst).num_edges(), 0);
            prop_assert!(inst.check_independent().is_ok());
        }
    }
}

#[test]
fn rational_supports_and_comments() {
    let text = "# two boxes\ndops 1\nd 2\ndir 0 1\ndir -1 0\nn 2\npoly 1/2 1 0 0  # half wide\npoly 3 1 -2 0\n";
    let inst = parse(text).unwrap();
    assert_eq!(inst.len(), 2);
    assert_eq!(inst.polygons[0].support(0), &misdop::geom::ratio(1, 2));
    assert!(inst.check_independent().is_ok());
    assert!(inst.check_inside().is_ok());
}

#[test]
fn errors_carry_line_numbers() {
    let cases = [
        ("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 1\npoly 1 1 x 0\n", 6),
        ("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 2\npoly 1 1 0 0\n", 0),
        ("dops 2\n", 1),
    ];
    for (text, line) in cases {
        match parse(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }
}

#[test]
fn intersecting_polygons_are_reported() {
    let inst = parse("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 2\npoly 2 2 0 0\npoly 3 3 -1 -1\n").unwrap();
    assert!(matches!(inst.check_independent(), Err(Error::NotIndependent(0, 1))));
    assert!(conflict_graph(&inst).has_edge(1, 0));
}
