//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and then
//! asserts it.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use misdop::charging::{best_option, check_injectivity, corner_polygons, ChargingOption};
use misdop::containers::{Container, CuttingLine, Fence, Side};
use misdop::dp::{dp_solve, exact_mis, replay_certificate, DpParams, EXACT_CAP};
use misdop::extension::{check_extension, maximal_extension};
use misdop::geom::{rat, Chain, Point, Polygon, Segment};
use misdop::instance::{default_directions, generate, parse, serialize, GenParams};
use misdop::oracle::{guillotine_opt, intersect_oracle, mis_enumerate, tiling_by_sampling};
use misdop::partitioner::{
    build_recursive_partition, check_step, parse_certificate, verify_partition, write_certificate, BuildParams,
    CaseTag, RecursivePartition, StepInput, VerifyParams,
};
use misdop::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, ok: bool, detail: String) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

const DS: [usize; 3] = [2, 3, 4];

/// Seeded independent instances, 100 per d, with 1 to 12 polygons.
fn independent_corpus(d: usize) -> Vec<Instance> {
    (0..100u64)
        .map(|k| {
            let mut g = GenParams::new(d, 1 + (k as usize % 12), 7000 + k);
            g.coord_range = 16;
            generate(&g).unwrap()
        })
        .collect()
}

struct Extended {
    d: usize,
    original: Instance,
    ext: Instance,
    ok: bool,
    idempotent: bool,
    failures: Vec<String>,
}

struct Corpus {
    items: Vec<Extended>,
    elapsed: Duration,
}

fn extended() -> &'static Corpus {
    static CELL: OnceLock<Corpus> = OnceLock::new();
    CELL.get_or_init(|| {
        let t = Instant::now();
        let mut items = Vec::new();
        for d in DS {
            for inst in independent_corpus(d) {
                let res = maximal_extension(&inst).unwrap();
                let rep = check_extension(&res);
                let again = maximal_extension(&res.instance).unwrap();
                items.push(Extended {
                    d,
                    original: inst,
                    idempotent: again.instance == res.instance,
                    ok: rep.ok(),
                    failures: rep.failures,
                    ext: res.instance,
                });
            }
        }
        Corpus { items, elapsed: t.elapsed() }
    })
}

/// An independent optimum of a random (overlapping) instance, extended.
struct Solved {
    d: usize,
    inst: Instance,
    opt: Vec<usize>,
    ext: Instance,
}

fn solved() -> &'static Vec<Solved> {
    static CELL: OnceLock<Vec<Solved>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for d in DS {
            for k in 0..100u64 {
                let mut g = GenParams::new(d, 4 + (k as usize % 9), 9000 + k);
                g.coord_range = 12;
                g.independent = false;
                let inst = generate(&g).unwrap();
                let opt = exact_mis(&inst, EXACT_CAP).unwrap();
                let ext = maximal_extension(&inst.subset(&opt)).unwrap().instance;
                out.push(Solved { d, inst, opt, ext });
            }
        }
        out
    })
}

type Built = Result<RecursivePartition, String>;

fn builds() -> &'static (Vec<Built>, Vec<Built>) {
    static CELL: OnceLock<(Vec<Built>, Vec<Built>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = BuildParams::default();
        let run = |i: &Instance| build_recursive_partition(i, &p).map_err(|e| e.to_string());
        let a = extended().items.iter().map(|e| run(&e.ext)).collect();
        let b = solved().iter().map(|s| run(&s.ext)).collect();
        (a, b)
    })
}

fn random_polygon(rng: &mut ChaCha8Rng, d: usize) -> Polygon {
    let ds = Arc::new(default_directions(d).unwrap());
    let c = Point::from_ints(rng.gen_range(0..=8), rng.gen_range(0..=8));
    let supports = (0..2 * d).map(|k| c.dot(ds.normal(k)) + rat(rng.gen_range(1..=4))).collect();
    Polygon::new(ds, supports).unwrap()
}

#[test]
fn intersection_criterion_matches_vertex_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut mismatches, mut meeting, mut pairs) = (0, 0, 0);
    for d in DS {
        for _ in 0..1000 {
            let (p, q) = (random_polygon(&mut rng, d), random_polygon(&mut rng, d));
            let fast = p.intersects(&q).unwrap();
            meeting += fast as usize;
            pairs += 1;
            if fast != intersect_oracle(&p, &q) || fast != q.intersects(&p).unwrap() {
                mismatches += 1;
            }
        }
    }
    let el = t.elapsed();
    report(
        "intersection-equivalence",
        mismatches == 0 && el < Duration::from_secs(5) && meeting > 0 && meeting < pairs,
        format!("{pairs} pairs ({meeting} intersecting), {mismatches} mismatches, {el:.2?}"),
    );
}

#[test]
fn extension_postconditions() {
    let c = extended();
    let bad: Vec<String> = c
        .items
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.ok || !e.idempotent)
        .map(|(k, e)| format!("#{k} d={} idempotent={} {:?}", e.d, e.idempotent, e.failures))
        .collect();
    let ok = bad.is_empty() && c.elapsed < Duration::from_secs(60);
    report(
        "extension-soundness",
        ok,
        format!("{} instances, {} failing, {:.2?} {:?}", c.items.len(), bad.len(), c.elapsed, bad.first()),
    );
}

#[test]
fn charging_bound_and_injectivity() {
    let mut bad = Vec::new();
    let mut options = 0;
    for (k, e) in extended().items.iter().enumerate() {
        let z = corner_polygons(&e.ext);
        let bound = (3 * (e.ext.len() - z.len())).div_ceil(4 * e.d);
        match best_option(&e.ext, &z) {
            Ok(r) if r.accountable.len() >= bound => {}
            Ok(r) => bad.push(format!("#{k}: {} < {bound}", r.accountable.len())),
            Err(err) => bad.push(format!("#{k}: {err}")),
        }
        for opt in ChargingOption::all(&e.ext.ds) {
            options += 1;
            if !check_injectivity(&e.ext.polygons, opt) {
                bad.push(format!("#{k}: {opt} not injective"));
            }
        }
    }
    report(
        "charging-bound",
        bad.is_empty(),
        format!("{} instances, {options} options, {} violations {:?}", extended().items.len(), bad.len(), bad.first()),
    );
}

fn steps_ok(rp: &RecursivePartition) -> Result<usize, String> {
    let z = corner_polygons(&rp.instance);
    let peels = misdop::partitioner::peel_corner_polygons(&rp.instance, &z);
    let catalog = misdop::containers::FenceCatalog::new(
        &rp.instance.polygons,
        &misdop::partitioner::peel_carriers(&rp.instance, &peels),
    );
    let mut count = 0;
    for node in &rp.nodes {
        let Some(s) = &node.step else { continue };
        count += 1;
        let [c1, c2] = s.children;
        let (pc, k1, k2) = (node.container.cycle(), rp.nodes[c1].container.cycle(), rp.nodes[c2].container.cycle());
        if !tiling_by_sampling(&pc, [&k1, &k2], 24) {
            return Err(format!("node {}: sampled tiling fails", node.id));
        }
        if s.case == CaseTag::Z {
            continue;
        }
        let input = StepInput {
            parent: &node.container,
            protected: &node.protected,
            gamma: &s.gamma,
            ell: &s.ell,
            children: [&rp.nodes[c1].container, &rp.nodes[c2].container],
            child_protected: [&rp.nodes[c1].protected, &rp.nodes[c2].protected],
        };
        let out = check_step(&input, &catalog, 8);
        if let Some(v) = out.violations.first() {
            return Err(format!("node {}: {v}", node.id));
        }
    }
    Ok(count)
}

#[test]
fn every_partition_step_passes_checker() {
    let (a, b) = builds();
    let mut steps = 0;
    let mut bad = Vec::new();
    for (k, r) in a.iter().chain(b).enumerate() {
        match r.as_ref().map_err(Clone::clone).and_then(steps_ok) {
            Ok(c) => steps += c,
            Err(e) => bad.push(format!("#{k}: {e}")),
        }
    }
    report(
        "partition-step-contract",
        bad.is_empty() && steps > 0,
        format!("{} certificates, {steps} steps, {} violations {:?}", a.len() + b.len(), bad.len(), bad.first()),
    );
}

#[test]
fn global_bound_against_exact_optimum() {
    let (a, b) = builds();
    let mut bad = Vec::new();
    let mut worst = (0usize, 1usize);
    let mut count = 0;
    let vp = VerifyParams::default();
    for (e, r) in extended().items.iter().zip(a) {
        let Ok(rp) = r else { continue };
        count += 1;
        let rep = verify_partition(rp, &e.ext, &vp);
        if !rep.passed() || exact_mis(&e.original, EXACT_CAP).unwrap().len() != e.original.len() {
            bad.push(format!("independent d={}: {}", e.d, rep));
        }
    }
    for (k, (s, r)) in solved().iter().zip(b).enumerate() {
        let Ok(rp) = r else {
            bad.push(format!("#{k}: {}", r.as_ref().unwrap_err()));
            continue;
        };
        count += 1;
        let n_opt = s.opt.len();
        if mis_enumerate(&s.inst).unwrap() != n_opt {
            bad.push(format!("#{k}: exact solver disagrees with enumeration"));
        }
        let rep = verify_partition(rp, &s.ext, &vp);
        let sm = &rep.summary;
        if !rep.passed() || sm.r < sm.z + sm.p.div_ceil(2) || 8 * s.d * sm.r < 3 * n_opt {
            bad.push(format!("#{k}: {rep}"));
        }
        let replay: Vec<usize> = match replay_certificate(&s.inst.subset(&s.opt), rp) {
            Ok(ids) => ids.into_iter().map(|i| s.opt[i]).collect(),
            Err(e) => {
                bad.push(format!("#{k}: replay {e}"));
                continue;
            }
        };
        let independent = replay.iter().enumerate().all(|(i, &p)| {
            replay[i + 1..].iter().all(|&q| !intersect_oracle(&s.inst.polygons[p], &s.inst.polygons[q]))
        });
        let m = replay.len();
        // OPT / |replay| <= 8d/3, compared exactly.
        if !independent || m < sm.r || 3 * n_opt > 8 * s.d * m || m < (3 * n_opt).div_ceil(8 * s.d) {
            bad.push(format!("#{k}: replay {m} of {n_opt}, independent={independent}"));
        }
        if m > 0 && n_opt * worst.1 > worst.0 * m {
            worst = (n_opt, m);
        }
    }
    report(
        "global-bound",
        bad.is_empty() && count == a.len() + b.len(),
        format!(
            "{count} certificates, worst ratio {}/{}, {} violations {:?}",
            worst.0,
            worst.1,
            bad.len(),
            bad.first()
        ),
    );
}

/// Rectangles as (x0, x1, y0, y1) on the 6x6 grid.
type Rects = Vec<(i64, i64, i64, i64)>;

fn canonical(r: &Rects) -> Rects {
    let maps: [fn((i64, i64, i64, i64)) -> (i64, i64, i64, i64); 8] = [
        |(a, b, c, d)| (a, b, c, d),
        |(a, b, c, d)| (6 - b, 6 - a, c, d),
        |(a, b, c, d)| (a, b, 6 - d, 6 - c),
        |(a, b, c, d)| (6 - b, 6 - a, 6 - d, 6 - c),
        |(a, b, c, d)| (c, d, a, b),
        |(a, b, c, d)| (6 - d, 6 - c, a, b),
        |(a, b, c, d)| (c, d, 6 - b, 6 - a),
        |(a, b, c, d)| (6 - d, 6 - c, 6 - b, 6 - a),
    ];
    maps.iter()
        .map(|m| {
            let mut v: Rects = r.iter().map(|&x| m(x)).collect();
            v.sort_unstable();
            v
        })
        .min()
        .unwrap()
}

fn rect_instance(r: &Rects) -> Instance {
    let ds = Arc::new(default_directions(2).unwrap());
    let polys = r
        .iter()
        .map(|&(x0, x1, y0, y1)| {
            let pts = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)].map(|(x, y)| Point::from_ints(x, y));
            Polygon::hull_of(ds.clone(), &pts).unwrap()
        })
        .collect();
    Instance::new(ds, polys).unwrap()
}

#[test]
fn container_dp_matches_guillotine_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = BTreeSet::new();
    let mut cases = Vec::new();
    while cases.len() < 2000 {
        let n = rng.gen_range(1..=5);
        let rects: Rects = (0..n)
            .map(|_| {
                let (a, b) = (rng.gen_range(0..6), rng.gen_range(0..6));
                let (c, d) = (rng.gen_range(0..6), rng.gen_range(0..6));
                (a.min(b), a.max(b) + 1, c.min(d), c.max(d) + 1)
            })
            .collect();
        let key = canonical(&rects);
        if seen.insert(key.clone()) {
            cases.push(key);
        }
    }
    let mut bad = Vec::new();
    for r in &cases {
        let inst = rect_instance(r);
        let dp = dp_solve(&inst, &DpParams::guillotine()).map(|x| x.ids.len());
        let oracle = guillotine_opt(&inst).unwrap();
        if dp.as_ref().ok() != Some(&oracle) {
            bad.push(format!("{r:?}: dp {dp:?}, oracle {oracle}"));
        }
    }
    let el = t.elapsed();
    report(
        "dp-micro-equivalence",
        bad.is_empty() && el < Duration::from_secs(600),
        format!("{} cases, {} mismatches, {el:.2?} {:?}", cases.len(), bad.len(), bad.first()),
    );
}

/// First small instance whose certificate charges a polygon and carries
/// protection from a parent into a child.
fn rich_certificate() -> (Instance, RecursivePartition) {
    for seed in 0..200u64 {
        let mut g = GenParams::new(2, 6 + (seed as usize % 7), seed);
        g.coord_range = 16;
        let inst = generate(&g).unwrap();
        let Ok(rp) = build_recursive_partition(&inst, &BuildParams::default()) else { continue };
        let charged = rp.nodes.iter().filter_map(|n| n.step.as_ref()).any(|s| !s.charges.is_empty());
        if charged && inherited(&rp).is_some() {
            return (inst, rp);
        }
    }
    panic!("no certificate with charges in range");
}

/// (child, polygon) protected at a step node and at its child.
fn inherited(rp: &RecursivePartition) -> Option<(usize, usize)> {
    rp.nodes.iter().find_map(|n| {
        let s = n.step.as_ref().filter(|s| s.case != CaseTag::Z)?;
        s.children.iter().find_map(|&c| rp.nodes[c].protected.iter().find(|p| n.protected.contains(p)).map(|&p| (c, p)))
    })
}

fn mutate_kappa(c: &mut Container) {
    while c.kappa() < 6 {
        let j = (0..c.kappa()).max_by_key(|&j| c.fences[j].chain.points().len()).unwrap();
        let pts = c.fences[j].chain.points().to_vec();
        let (head, tail) = if pts.len() > 2 {
            let k = pts.len() / 2;
            (pts[..=k].to_vec(), pts[k..].to_vec())
        } else {
            let m = pts[0].midpoint(&pts[1]);
            (vec![pts[0].clone(), m.clone()], vec![m, pts[1].clone()])
        };
        let at = head.last().unwrap().clone();
        let kind = c.fences[j].kind;
        let source = c.fences[j].source.clone();
        c.fences[j] = Fence { chain: Chain::new(head), kind, source: source.clone() };
        c.fences.insert(j + 1, Fence { chain: Chain::new(tail), kind, source });
        c.cuts.insert(j + 1, CuttingLine { seg: Segment::new(at.clone(), at), side: Side::Right });
    }
}

#[test]
fn certificate_mutations_are_rejected() {
    let (inst, rp) = rich_certificate();
    let vp = VerifyParams::default();
    let clean = verify_partition(&rp, &inst, &vp);
    let mut lines = vec![format!("unmutated passed={}", clean.passed())];
    let mut ok = clean.passed();
    let step_nodes: Vec<usize> =
        rp.nodes.iter().filter(|n| n.step.as_ref().is_some_and(|s| s.case != CaseTag::Z)).map(|n| n.id).collect();

    let mut mutants: Vec<(&str, RecursivePartition)> = Vec::new();

    let mut m = rp.clone();
    let (c, p) = inherited(&rp).unwrap();
    m.nodes[c].protected.retain(|&q| q != p);
    mutants.push(("protected-monotonicity", m));

    let mut m = rp.clone();
    let k = *step_nodes.iter().find(|&&k| !rp.nodes[k].protected.is_empty()).unwrap();
    let p = rp.nodes[k].protected[0];
    let vs = m.instance.polygons[p].vertices();
    let x = (vs.iter().map(|v| &v.x).min().unwrap() + vs.iter().map(|v| &v.x).max().unwrap()) / rat(2);
    let (y0, y1) = (vs.iter().map(|v| &v.y).min().unwrap().clone(), vs.iter().map(|v| &v.y).max().unwrap().clone());
    m.nodes[k].step.as_mut().unwrap().ell = Segment::new(Point::new(x.clone(), y0), Point::new(x, y1));
    mutants.push(("P3", m));

    let mut m = rp.clone();
    let k = step_nodes[0];
    let c = rp.nodes[k].step.as_ref().unwrap().children[0];
    m.nodes[c].container = rp.nodes[k].container.clone();
    mutants.push(("P1-tiling", m));

    let mut m = rp.clone();
    let k = rp.nodes.iter().position(|n| n.step.as_ref().is_some_and(|s| !s.charges.is_empty())).unwrap();
    let s = m.nodes[k].step.as_mut().unwrap();
    s.charges.push(s.charges[0]);
    mutants.push(("charge-injectivity", m));

    let mut m = rp.clone();
    let last = m.nodes.len() - 1;
    assert!(m.nodes[last].is_leaf());
    m.nodes.pop();
    mutants.push(("tree-structure", m));

    let mut m = rp.clone();
    mutate_kappa(&mut m.nodes[step_nodes[0]].container);
    mutants.push(("kappa", m));

    for (name, m) in &mutants {
        let rep = verify_partition(m, &inst, &vp);
        let caught = rep.has(name);
        ok &= caught;
        lines.push(format!("{name}={}", if caught { "rejected" } else { "missed" }));
    }
    report("certificate-mutations", ok && mutants.len() == 6, lines.join(", "));
}

fn pipeline(d: usize, seed: u64) -> String {
    let mut g = GenParams::new(d, 3 + (seed as usize % 6), seed);
    g.coord_range = 10;
    g.independent = false;
    let inst = generate(&g).unwrap();
    let mut out = serialize(&inst);
    let opt = exact_mis(&inst, EXACT_CAP).unwrap();
    out += &format!("{opt:?}\n");
    let res = maximal_extension(&inst.subset(&opt)).unwrap();
    out += &serialize(&res.instance);
    for e in &res.log {
        out += &format!("{e}\n");
    }
    match build_recursive_partition(&res.instance, &BuildParams::default()) {
        Ok(rp) => out += &write_certificate(&rp),
        Err(e) => out += &e.to_string(),
    }
    out
}

#[test]
fn round_trip_and_determinism() {
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..500u64 {
        let d = DS[k as usize % 3];
        let mut g = GenParams::new(d, rng.gen_range(1..=12), k);
        g.independent = rng.gen_bool(0.5);
        let inst = generate(&g).unwrap();
        let text = serialize(&inst);
        match parse(&text) {
            Ok(back) if back == inst && serialize(&back) == text => {}
            _ => bad.push(format!("instance #{k}")),
        }
    }
    let mut certs = 0;
    for (e, r) in extended().items.iter().zip(&builds().0) {
        let Ok(rp) = r else { continue };
        certs += 1;
        let text = write_certificate(rp);
        match parse_certificate(&text, &e.ext) {
            Ok(back) if write_certificate(&back) == text && back.nodes == rp.nodes => {}
            _ => bad.push(format!("certificate d={}", e.d)),
        }
    }
    let mut runs = 0;
    for d in DS {
        for seed in 0..10 {
            runs += 1;
            if pipeline(d, seed) != pipeline(d, seed) {
                bad.push(format!("pipeline d={d} seed={seed} differs"));
            }
        }
    }
    let r = rect_instance(&vec![(0, 2, 0, 3), (1, 4, 2, 5), (3, 6, 0, 2)]);
    let dp = |i: &Instance| dp_solve(i, &DpParams::guillotine()).unwrap();
    if dp(&r) != dp(&r) {
        bad.push("dp differs".into());
    }
    report(
        "round-trip-determinism",
        bad.is_empty(),
        format!(
            "500 instances, {certs} certificates, {runs} pipelines twice, {} failures {:?}",
            bad.len(),
            bad.first()
        ),
    );
}
