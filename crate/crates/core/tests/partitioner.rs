use misdop::dp::replay_certificate;
use misdop::extension::maximal_extension;
use misdop::instance::{generate, parse, GenParams};
use misdop::partitioner::{
    build_recursive_partition, parse_certificate, verify_partition, write_certificate, BuildParams, CaseTag,
    VerifyParams,
};
use misdop::{Error, Instance};
use proptest::prelude::*;

fn extended(d: usize, n: usize, seed: u64) -> Instance {
    let mut g = GenParams::new(d, n, seed);
    g.coord_range = 16;
    maximal_extension(&generate(&g).unwrap()).unwrap().instance
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn built_certificates_verify(d in 2usize..=4, n in 1usize..=9, seed in 0u64..5000) {
        let inst = extended(d, n, seed);
        let rp = build_recursive_partition(&inst, &BuildParams::default()).unwrap();
        let text = write_certificate(&rp);
        let back = parse_certificate(&text, &inst).unwrap();
        prop_assert_eq!(write_certificate(&back), text);
        let rep = verify_partition(&back, &inst, &VerifyParams::default());
        prop_assert!(rep.passed(), "{}", rep);
        let s = rp.summary();
        prop_assert!(s.ledger_ok() && s.half_ok() && s.ratio_ok(n));
        prop_assert_eq!(rp.nodes.iter().filter(|x| x.is_leaf() && x.leaf.is_some()).count(), s.r);
        let replay = replay_certificate(&inst, &rp).unwrap();
        prop_assert!(replay.len() >= s.r);
    }
}

#[test]
fn single_polygon_is_kept() {
    let inst = extended(2, 1, 3);
    let rp = build_recursive_partition(&inst, &BuildParams::default()).unwrap();
    assert_eq!(rp.kept, vec![0]);
    assert!(verify_partition(&rp, &inst, &VerifyParams::default()).passed());
}

#[test]
fn corner_polygons_are_peeled_first() {
    let inst = extended(3, 8, 11);
    let rp = build_recursive_partition(&inst, &BuildParams::default()).unwrap();
    let peels = rp.nodes.iter().filter_map(|n| n.step.as_ref()).filter(|s| s.case == CaseTag::Z).count();
    assert_eq!(peels, rp.z.len());
    for z in &rp.z {
        assert!(rp.kept.contains(z));
    }
}

#[test]
fn intersecting_input_is_refused() {
    let inst = parse("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 2\npoly 2 2 0 0\npoly 3 3 -1 -1\n").unwrap();
    assert!(matches!(build_recursive_partition(&inst, &BuildParams::default()), Err(Error::NotIndependent(0, 1))));
}

#[test]
fn malformed_certificates_are_parse_errors() {
    let inst = extended(2, 4, 5);
    let rp = build_recursive_partition(&inst, &BuildParams::default()).unwrap();
    let text = write_certificate(&rp);
    let cut = text.len() / 2;
    let truncated = &text[..text[..cut].rfind('\n').unwrap() + 1];
    assert!(matches!(parse_certificate(truncated, &inst), Err(Error::Parse { .. })));
    let bad_id = text.replacen("protected", "protected 99", 1);
    assert!(matches!(parse_certificate(&bad_id, &inst), Err(Error::InvalidCertificate(_))));
    let bad_option = text.replacen(&format!("option {}", rp.option), "option v9t", 1);
    assert!(parse_certificate(&bad_option, &inst).is_err());
    let other = extended(2, 4, 6);
    let rep = verify_partition(&parse_certificate(&text, &other).unwrap(), &other, &VerifyParams::default());
    assert!(!rep.passed());
}

#[test]
fn case_tags_round_trip() {
    for tag in ["A1", "A2", "A3", "A4", "A5", "B1", "B2", "C1", "C2", "C3", "Z"] {
        assert_eq!(tag.parse::<CaseTag>().unwrap().to_string(), tag);
    }
    assert!("D1".parse::<CaseTag>().is_err());
}
