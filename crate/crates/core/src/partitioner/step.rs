//! One bipartition of a structured container.
//!
//! The separating curve Γ is a vertical segment ℓ whose ends either lie on
//! the container boundary or continue along a protecting fence until the
//! fence meets the boundary; a protecting fence on its own (degenerate ℓ)
//! is also tried. Candidates are ordered by the number of polygons they cut
//! and the first one passing every check of [`check_step`] is taken.

use std::collections::BTreeSet;

use crate::containers::{
    chain_meets_segment, find_protection, opt_in_cycle, sub_chain, Container, FenceCatalog, ProtectionWitness, Role,
    Side,
};
use crate::geom::{
    point_in_closure, point_in_interior, point_on_boundary, segment_meets_open_convex, split_by_boundary, Chain, Point,
    Rational, Segment,
};
use crate::{Error, Result};

use super::check::{check_step, StepInput};
use super::CaseTag;

pub struct StepContext<'a> {
    pub catalog: &'a FenceCatalog,
    /// Accountable flag per polygon (corner polygons are never accountable).
    pub accountable: &'a [bool],
    /// Resolution of the sampling check run on every accepted step.
    pub sample_res: u32,
    /// Upper bound on fully checked candidates.
    pub max_attempts: usize,
}

#[derive(Clone, Debug)]
pub struct PartitionStep {
    pub case: CaseTag,
    pub gamma: Chain,
    pub ell: Segment,
    pub children: [Container; 2],
    pub opt: [Vec<usize>; 2],
    pub protected: [Vec<usize>; 2],
    pub lost: Vec<usize>,
    pub charges: Vec<(usize, usize)>,
    /// Candidates fully checked before one passed.
    pub attempts: usize,
}

/// A protecting fence oriented so that its tail lies on the cutting line it
/// emerges from.
struct Guide {
    chain: Chain,
    side: Side,
    /// Whether this fence ends in the corner of the protected polygon on
    /// its right edge (a left protection's end) or on its left edge.
    target: Point,
}

struct Anchor {
    point: Point,
    /// Path from `point` to the boundary (just `point` when on it).
    cont: Vec<Point>,
    guide: Option<usize>,
}

struct Candidate {
    gamma: Vec<(Segment, Role)>,
    gamma_chain: Chain,
    ell: Segment,
    lost: Vec<usize>,
    guides: Vec<usize>,
    anchors_at_target: bool,
    fence_only: bool,
}

fn orient_guide(chain: &Chain, via: &Segment) -> Chain {
    if via.contains(chain.tail()) {
        chain.clone()
    } else {
        chain.reversed()
    }
}

fn guides_from(witnesses: &[ProtectionWitness], catalog: &FenceCatalog) -> Vec<Guide> {
    let mut out = Vec::new();
    for w in witnesses {
        let p = &catalog.polygons[w.polygon];
        let d = p.ds().d();
        for (c, target) in [
            (&w.top, if w.side == Side::Left { p.head(0) } else { p.tail(d) }),
            (&w.bottom, if w.side == Side::Left { p.tail(0) } else { p.head(d) }),
        ] {
            out.push(Guide { chain: orient_guide(c, &w.via), side: w.side, target: target.clone() });
        }
    }
    out
}

/// Walks from `q` along `g` towards its tail and stops at the first
/// boundary point.
fn continuation(g: &Chain, q: &Point, cycle: &[Point]) -> Option<Vec<Point>> {
    if point_on_boundary(cycle, q) {
        return Some(vec![q.clone()]);
    }
    let path = sub_chain(g, q, g.tail())?;
    let mut out = vec![q.clone()];
    for s in path.segments() {
        let pts = split_by_boundary(cycle, &s.tail, &s.head);
        for p in pts.into_iter().skip(1) {
            out.push(p.clone());
            if point_on_boundary(cycle, &p) {
                out.dedup();
                return Some(out);
            }
        }
    }
    None
}

fn vertical_events(cycle: &[Point], x: &Rational) -> Vec<Rational> {
    let n = cycle.len();
    let mut ys: Vec<Rational> = Vec::new();
    for k in 0..n {
        let (a, b) = (&cycle[k], &cycle[(k + 1) % n]);
        if &a.x == x && &b.x == x {
            ys.push(a.y.clone());
            ys.push(b.y.clone());
        } else if (&a.x <= x && x <= &b.x) || (&b.x <= x && x <= &a.x) {
            let t = (x - &a.x) / (&b.x - &a.x);
            ys.push(&a.y + (&b.y - &a.y) * t);
        }
    }
    ys.sort();
    ys.dedup();
    ys
}

fn lost_by(ell: &Segment, opt: &[usize], catalog: &FenceCatalog) -> Vec<usize> {
    opt.iter()
        .copied()
        .filter(|&p| {
            let poly = &catalog.polygons[p];
            if ell.is_degenerate() {
                poly.contains_open(&ell.tail)
            } else {
                segment_meets_open_convex(&ell.tail, &ell.head, poly)
            }
        })
        .collect()
}

fn push_path(out: &mut Vec<(Segment, Role)>, pts: &[Point], role: Role) {
    for w in pts.windows(2) {
        if w[0] != w[1] {
            out.push((Segment::new(w[0].clone(), w[1].clone()), role));
        }
    }
}

fn build_candidate(
    lo: &Anchor,
    hi: &Anchor,
    opt: &[usize],
    catalog: &FenceCatalog,
    guides: &[Guide],
) -> Option<Candidate> {
    let ell = Segment::new(lo.point.clone(), hi.point.clone());
    let mut gamma = Vec::new();
    let mut rev: Vec<Point> = lo.cont.clone();
    rev.reverse();
    push_path(&mut gamma, &rev, Role::Fence);
    push_path(&mut gamma, &[lo.point.clone(), hi.point.clone()], Role::Cut);
    push_path(&mut gamma, &hi.cont, Role::Fence);
    if gamma.is_empty() {
        return None;
    }
    let mut pts: Vec<Point> = vec![gamma[0].0.tail.clone()];
    pts.extend(gamma.iter().map(|(s, _)| s.head.clone()));
    let gamma_chain = Chain::new(pts);
    if gamma_chain.tail() == gamma_chain.head() {
        return None;
    }
    let used: Vec<usize> = [lo.guide, hi.guide].into_iter().flatten().collect();
    let anchors_at_target = used.iter().all(|&g| {
        let t = &guides[g].target;
        *t == lo.point || *t == hi.point
    });
    Some(Candidate {
        lost: lost_by(&ell, opt, catalog),
        gamma,
        gamma_chain,
        ell,
        guides: used,
        anchors_at_target,
        fence_only: false,
    })
}

fn classify(c: &Candidate, guides: &[Guide], has_left_protected: bool) -> CaseTag {
    if c.fence_only {
        return CaseTag::B1;
    }
    match c.guides.len() {
        0 => {
            if has_left_protected {
                CaseTag::A1
            } else {
                CaseTag::C1
            }
        }
        1 => {
            let g = &guides[c.guides[0]];
            if !has_left_protected {
                CaseTag::C3
            } else if c.anchors_at_target && g.side == Side::Left {
                CaseTag::A2
            } else {
                CaseTag::A5
            }
        }
        _ => {
            let sides: BTreeSet<Side> = c.guides.iter().map(|&g| guides[g].side).collect();
            if !c.anchors_at_target {
                CaseTag::C2
            } else if sides.len() == 2 {
                CaseTag::A3
            } else {
                CaseTag::A4
            }
        }
    }
}

/// Splits the closed tagged boundary at the two ends of Γ.
fn split_boundary(
    bnd: &[(Segment, Role)],
    gamma: &[(Segment, Role)],
) -> Vec<(Vec<(Segment, Role)>, Vec<(Segment, Role)>)> {
    let a = &gamma[0].0.tail;
    let b = &gamma[gamma.len() - 1].0.head;
    let locs = |p: &Point| -> Vec<usize> {
        bnd.iter().enumerate().filter(|(_, (s, _))| s.contains(p) && &s.head != p).map(|(k, _)| k).collect()
    };
    let m = bnd.len();
    // Boundary arc from `p` on segment `i` to `q` on segment `j`.
    let arc = |p: &Point, i: usize, q: &Point, j: usize| -> Vec<(Segment, Role)> {
        let mut out = Vec::new();
        let same = i == j
            && crate::geom::param_on(&bnd[i].0.tail, &bnd[i].0.head, p)
                <= crate::geom::param_on(&bnd[i].0.tail, &bnd[i].0.head, q);
        if same {
            out.push((Segment::new(p.clone(), q.clone()), bnd[i].1));
            return out;
        }
        out.push((Segment::new(p.clone(), bnd[i].0.head.clone()), bnd[i].1));
        let mut k = (i + 1) % m;
        while k != j {
            out.push(bnd[k].clone());
            k = (k + 1) % m;
        }
        out.push((Segment::new(bnd[j].0.tail.clone(), q.clone()), bnd[j].1));
        out.retain(|(s, _)| !s.is_degenerate());
        out
    };
    let rev_gamma: Vec<(Segment, Role)> = gamma.iter().rev().map(|(s, r)| (s.reversed(), *r)).collect();
    let mut out = Vec::new();
    for &i in &locs(a) {
        for &j in &locs(b) {
            let mut c1: Vec<(Segment, Role)> = gamma.to_vec();
            c1.extend(arc(b, j, a, i));
            let mut c2 = arc(a, i, b, j);
            c2.extend(rev_gamma.iter().cloned());
            out.push((c1, c2));
        }
    }
    out
}

/// Performs one bipartition of `c`. `protected` must be protected by fences
/// in `c`; `avoid` lists further polygons Γ must not cut.
pub fn partition_step(
    c: &Container,
    protected: &[usize],
    avoid: &[usize],
    ctx: &StepContext<'_>,
) -> Result<PartitionStep> {
    let catalog = ctx.catalog;
    let cycle = c.cycle();
    let opt = opt_in_cycle(&cycle, &catalog.polygons);
    if opt.len() < 2 {
        return Err(Error::Partition("fewer than two polygons".into()));
    }
    let mut witnesses = Vec::new();
    for &p in protected {
        match find_protection(p, c, catalog) {
            Some(w) => witnesses.push(w),
            None => return Err(Error::Partition(format!("protected polygon {p} has no fences"))),
        }
    }
    for &p in avoid {
        if let Some(w) = find_protection(p, c, catalog) {
            witnesses.push(w);
        }
    }
    let has_left_protected = witnesses.iter().any(|w| w.side == Side::Left);
    let guides = guides_from(&witnesses, catalog);
    let forbidden: BTreeSet<usize> = protected.iter().chain(avoid).copied().collect();

    // Rails Γ may follow: protecting fences first (they decide the case
    // tag), then every carrier in both directions.
    let mut rails: Vec<(Chain, Option<usize>)> =
        guides.iter().enumerate().map(|(i, g)| (g.chain.clone(), Some(i))).collect();
    for k in &catalog.carriers {
        if k.chain.num_segments() > 0 {
            rails.push((k.chain.clone(), None));
            rails.push((k.chain.reversed(), None));
        }
    }

    let mut xs: BTreeSet<Rational> = cycle.iter().map(|p| p.x.clone()).collect();
    for &p in &opt {
        xs.extend(catalog.polygons[p].vertices().into_iter().map(|v| v.x));
    }
    for (r, _) in &rails {
        xs.extend(r.points().iter().filter(|v| point_in_closure(&cycle, v)).map(|v| v.x.clone()));
    }

    let mut cands: Vec<Candidate> = Vec::new();
    let mut seen_gamma: BTreeSet<Vec<Point>> = BTreeSet::new();
    for x in &xs {
        let ys = vertical_events(&cycle, x);
        for w in ys.windows(2) {
            let mid = Point::new(x.clone(), (&w[0] + &w[1]) / Rational::from_integer(2.into()));
            if !point_in_interior(&cycle, &mid) {
                continue;
            }
            let lo_pt = Point::new(x.clone(), w[0].clone());
            let hi_pt = Point::new(x.clone(), w[1].clone());
            let chord = Segment::new(lo_pt.clone(), hi_pt.clone());
            let mut anchors = vec![
                Anchor { point: lo_pt.clone(), cont: vec![lo_pt.clone()], guide: None },
                Anchor { point: hi_pt.clone(), cont: vec![hi_pt.clone()], guide: None },
            ];
            let mut paths: BTreeSet<Vec<Point>> = BTreeSet::new();
            for (r, gi) in &rails {
                for q in chain_meets_segment(r, &chord) {
                    if point_on_boundary(&cycle, &q) {
                        continue;
                    }
                    if let Some(cont) = continuation(r, &q, &cycle) {
                        if cont.len() > 1 && paths.insert(cont.clone()) {
                            anchors.push(Anchor { point: q, cont, guide: *gi });
                        }
                    }
                }
            }
            for lo in &anchors {
                for hi in &anchors {
                    if lo.point.y > hi.point.y {
                        continue;
                    }
                    if lo.point == hi.point && (lo.cont.len() < 2 || hi.cont.len() < 2 || lo.cont == hi.cont) {
                        continue;
                    }
                    if let Some(cand) = build_candidate(lo, hi, &opt, catalog, &guides) {
                        if seen_gamma.insert(cand.gamma_chain.points().to_vec()) {
                            cands.push(cand);
                        }
                    }
                }
            }
        }
    }
    // A fence on its own, between two consecutive boundary contacts.
    for (r, gi) in &rails {
        let mut walk: Vec<(Point, bool)> = vec![(r.tail().clone(), point_on_boundary(&cycle, r.tail()))];
        for s in r.segments() {
            for p in split_by_boundary(&cycle, &s.tail, &s.head).into_iter().skip(1) {
                let b = point_on_boundary(&cycle, &p);
                if walk.last().map(|(q, _)| q) != Some(&p) {
                    walk.push((p, b));
                }
            }
        }
        let contacts: Vec<usize> = (0..walk.len()).filter(|&k| walk[k].1).collect();
        for pair in contacts.windows(2) {
            let (i, j) = (pair[0], pair[1]);
            let mid = walk[i].0.midpoint(&walk[i + 1].0);
            if !point_in_interior(&cycle, &mid) {
                continue;
            }
            let pts: Vec<Point> = walk[i..=j].iter().map(|(p, _)| p.clone()).collect();
            if !seen_gamma.insert(pts.clone()) {
                continue;
            }
            let mut rev = pts.clone();
            rev.reverse();
            if seen_gamma.contains(&rev) {
                continue;
            }
            let chain = Chain::new(pts);
            let mut gamma = Vec::new();
            push_path(&mut gamma, chain.points(), Role::Fence);
            for end in [chain.head().clone(), chain.tail().clone()] {
                cands.push(Candidate {
                    gamma: gamma.clone(),
                    gamma_chain: chain.clone(),
                    ell: Segment::new(end.clone(), end),
                    lost: Vec::new(),
                    guides: gi.iter().copied().collect(),
                    anchors_at_target: false,
                    fence_only: true,
                });
            }
        }
    }
    cands.retain(|c| c.lost.iter().all(|p| !forbidden.contains(p)));
    cands.sort_by_key(|c| (c.lost.len(), c.guides.len() + c.fence_only as usize));

    let bnd = c.tagged();
    let mut attempts = 0;
    for cand in &cands {
        if attempts >= ctx.max_attempts {
            break;
        }
        for (t1, t2) in split_boundary(&bnd, &cand.gamma) {
            let joints = [cand.ell.tail.clone(), cand.ell.head.clone()];
            let (k1, k2) = match (
                Container::from_tagged_with_joints(&t1, catalog, &joints),
                Container::from_tagged_with_joints(&t2, catalog, &joints),
            ) {
                (Ok(k1), Ok(k2)) => (k1, k2),
                _ => continue,
            };
            attempts += 1;
            let o1 = opt_in_cycle(&k1.cycle(), &catalog.polygons);
            let o2 = opt_in_cycle(&k2.cycle(), &catalog.polygons);
            if o1.len().max(o2.len()) >= opt.len() {
                continue;
            }
            let lost: Vec<usize> = opt.iter().copied().filter(|p| !o1.contains(p) && !o2.contains(p)).collect();
            let Some((prot, charges)) = assign_protection(protected, &lost, &opt, [&o1, &o2], ctx) else { continue };
            let input = StepInput {
                parent: c,
                protected,
                gamma: &cand.gamma_chain,
                ell: &cand.ell,
                children: [&k1, &k2],
                child_protected: [&prot[0], &prot[1]],
            };
            let outcome = check_step(&input, catalog, ctx.sample_res);
            if !outcome.ok() {
                continue;
            }
            return Ok(PartitionStep {
                case: classify(cand, &guides, has_left_protected),
                gamma: cand.gamma_chain.clone(),
                ell: cand.ell.clone(),
                children: [k1, k2],
                opt: [o1, o2],
                protected: prot,
                lost,
                charges,
                attempts,
            });
        }
    }
    Err(Error::NoValidCut(format!("{} candidates, {} checked, {} polygons", cands.len(), attempts, opt.len())))
}

/// Applies the protection rules: inherited protection, charging of lost
/// accountable polygons to a polygon they see, and protection of seers of
/// lost polygons. Returns `None` if a lost accountable polygon sees nothing
/// in the container.
fn assign_protection(
    protected: &[usize],
    lost: &[usize],
    opt: &[usize],
    kids: [&Vec<usize>; 2],
    ctx: &StepContext<'_>,
) -> Option<([Vec<usize>; 2], Vec<(usize, usize)>)> {
    let seeing = &ctx.catalog.seeing;
    let mut prot: [BTreeSet<usize>; 2] = [BTreeSet::new(), BTreeSet::new()];
    for &p in protected {
        for i in 0..2 {
            if kids[i].contains(&p) {
                prot[i].insert(p);
            }
        }
    }
    let mut charges = Vec::new();
    for &p in lost {
        if !ctx.accountable[p] {
            continue;
        }
        let seen: Vec<usize> = seeing.seen[p].iter().copied().filter(|q| opt.contains(q)).collect();
        let fresh = seen.iter().copied().find(|q| !prot[0].contains(q) && !prot[1].contains(q));
        let target = fresh.or_else(|| seen.first().copied())?;
        charges.push((p, target));
        for i in 0..2 {
            if kids[i].contains(&target) {
                prot[i].insert(target);
            }
        }
    }
    for &q in lost {
        if let Some(s) = seeing.seer[q] {
            for i in 0..2 {
                if kids[i].contains(&s) {
                    prot[i].insert(s);
                }
            }
        }
    }
    let [a, b] = prot;
    Some(([a.into_iter().collect(), b.into_iter().collect()], charges))
}
