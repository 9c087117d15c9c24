//! Independent checks of one bipartition step (P1–P5).

use std::collections::BTreeMap;
use std::fmt;

use crate::containers::{check_structured, find_protection, opt_in_cycle, Container, ContainerError, FenceCatalog};
use crate::geom::{
    point_on_boundary, rat, segment_in_closure, segment_meets_open_convex, winding_number, Chain, Point, Rational,
    Segment,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepViolation {
    /// A child is not a valid structured container.
    Structure { child: usize, error: ContainerError },
    /// Children do not tile the parent.
    Tiling(String),
    /// The separating curve leaves the parent container.
    GammaOutside,
    /// A polygon meets Γ but not ℓ.
    P2(usize),
    /// A protected polygon meets Γ or ℓ, or is lost.
    P3(usize),
    /// A protected polygon has no protecting fences in its child.
    P4(usize),
    /// ℓ is not part of a cutting line of the given child.
    P5(usize),
    /// A protected polygon is missing from its child's protected set.
    Monotonicity(usize),
    /// A polygon listed as protected in a child is not inside it or has no
    /// protecting fences there.
    Unprotected(usize),
}

impl StepViolation {
    pub fn name(&self) -> &'static str {
        match self {
            StepViolation::Structure { error: ContainerError::TooManySegments(_), .. } => "kappa",
            StepViolation::Structure { .. } => "P1-structure",
            StepViolation::Tiling(_) => "P1-tiling",
            StepViolation::GammaOutside => "P1-gamma",
            StepViolation::P2(_) => "P2",
            StepViolation::P3(_) => "P3",
            StepViolation::P4(_) => "P4",
            StepViolation::P5(_) => "P5",
            StepViolation::Monotonicity(_) => "protected-monotonicity",
            StepViolation::Unprotected(_) => "unprotected",
        }
    }
}

impl fmt::Display for StepViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepViolation::Structure { child, error } => write!(f, "P1: child {child}: {error}"),
            StepViolation::Tiling(m) => write!(f, "P1: tiling: {m}"),
            StepViolation::GammaOutside => write!(f, "P1: separating curve leaves the container"),
            StepViolation::P2(p) => write!(f, "P2: polygon {p} meets the curve away from the cutting line"),
            StepViolation::P3(p) => write!(f, "P3: protected polygon {p} is cut"),
            StepViolation::P4(p) => write!(f, "P4: protected polygon {p} loses its fences"),
            StepViolation::P5(c) => write!(f, "P5: cutting line missing on child {c}"),
            StepViolation::Monotonicity(p) => write!(f, "protected polygon {p} dropped"),
            StepViolation::Unprotected(p) => write!(f, "polygon {p} marked protected without fences"),
        }
    }
}

pub struct StepInput<'a> {
    pub parent: &'a Container,
    pub protected: &'a [usize],
    pub gamma: &'a Chain,
    pub ell: &'a Segment,
    pub children: [&'a Container; 2],
    pub child_protected: [&'a [usize]; 2],
}

#[derive(Clone, Debug, Default)]
pub struct StepOutcome {
    pub opt: Vec<usize>,
    pub child_opt: [Vec<usize>; 2],
    pub lost: Vec<usize>,
    pub violations: Vec<StepViolation>,
}

impl StepOutcome {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn chain_meets_polygon(c: &Chain, p: &crate::geom::Polygon) -> bool {
    if c.points().len() == 1 {
        return p.contains_open(c.tail());
    }
    c.segments().any(|s| segment_meets_open_convex(&s.tail, &s.head, p))
}

fn cycle_segments(cycle: &[Point]) -> Vec<(Point, Point)> {
    let n = cycle.len();
    (0..n).map(|k| (cycle[k].clone(), cycle[(k + 1) % n].clone())).collect()
}

/// The boundaries of the children sum to the boundary of the parent as
/// 1-chains, so winding numbers add up everywhere off the boundaries.
pub fn tiling_exact(parent: &[Point], kids: [&[Point]; 2]) -> Result<(), String> {
    let all: Vec<Point> = parent.iter().chain(kids[0]).chain(kids[1]).cloned().collect();
    let mut net: BTreeMap<(Point, Point), i64> = BTreeMap::new();
    let mut add = |cycle: &[Point], sign: i64| {
        for (a, b) in cycle_segments(cycle) {
            let seg = Segment::new(a.clone(), b.clone());
            let mut inner: Vec<&Point> = all.iter().filter(|p| seg.interior_contains(p)).collect();
            inner.sort_by_key(|p| crate::geom::param_on(&a, &b, p));
            inner.dedup();
            let mut pts = vec![a.clone()];
            pts.extend(inner.into_iter().cloned());
            pts.push(b.clone());
            for w in pts.windows(2) {
                let (key, s) =
                    if w[0] < w[1] { ((w[0].clone(), w[1].clone()), 1) } else { ((w[1].clone(), w[0].clone()), -1) };
                *net.entry(key).or_insert(0) += s * sign;
            }
        }
    };
    add(parent, -1);
    add(kids[0], 1);
    add(kids[1], 1);
    match net.iter().find(|(_, v)| **v != 0) {
        Some(((a, b), v)) => Err(format!("edge {a:?}-{b:?} has net multiplicity {v}")),
        None => Ok(()),
    }
}

/// Exact winding checks on a lattice of sample points over the parent.
pub fn tiling_sampled(parent: &[Point], kids: [&[Point]; 2], res: u32) -> Result<(), String> {
    if res == 0 || parent.is_empty() {
        return Ok(());
    }
    let minx = parent.iter().map(|p| &p.x).min().unwrap().clone();
    let maxx = parent.iter().map(|p| &p.x).max().unwrap().clone();
    let miny = parent.iter().map(|p| &p.y).min().unwrap().clone();
    let maxy = parent.iter().map(|p| &p.y).max().unwrap().clone();
    let r = rat(res as i64);
    let dx = (&maxx - &minx) / &r;
    let dy = (&maxy - &miny) / &r;
    let off = Rational::new(1.into(), 3.into());
    for i in 0..res {
        for j in 0..res {
            let p = Point::new(
                &minx + &dx * (rat(i as i64) + &off),
                &miny + &dy * (rat(j as i64) + Rational::new(2.into(), 7.into())),
            );
            if point_on_boundary(parent, &p) || point_on_boundary(kids[0], &p) || point_on_boundary(kids[1], &p) {
                continue;
            }
            let w = winding_number(parent, &p);
            let w1 = winding_number(kids[0], &p);
            let w2 = winding_number(kids[1], &p);
            if !(0..=1).contains(&w1) || !(0..=1).contains(&w2) || w != w1 + w2 {
                return Err(format!("sample {p:?}: parent {w}, children {w1} + {w2}"));
            }
        }
    }
    Ok(())
}

fn in_some_cut(c: &Container, ell: &Segment) -> bool {
    c.cuts.iter().any(|s| s.seg.contains(&ell.tail) && s.seg.contains(&ell.head))
}

/// Checks P1–P5 for one step. `sample_res` adds a dense sampling check of
/// the tiling (0 disables it).
pub fn check_step(input: &StepInput<'_>, catalog: &FenceCatalog, sample_res: u32) -> StepOutcome {
    let polys = &catalog.polygons;
    let mut out = StepOutcome::default();
    let pc = input.parent.cycle();
    let kc = [input.children[0].cycle(), input.children[1].cycle()];
    out.opt = opt_in_cycle(&pc, polys);
    for i in 0..2 {
        if let Err(error) = check_structured(input.children[i], catalog) {
            out.violations.push(StepViolation::Structure { child: i, error });
        }
        out.child_opt[i] = opt_in_cycle(&kc[i], polys).into_iter().filter(|p| out.opt.contains(p)).collect();
    }
    if let Err(m) = tiling_exact(&pc, [&kc[0], &kc[1]]) {
        out.violations.push(StepViolation::Tiling(m));
    } else if let Err(m) = tiling_sampled(&pc, [&kc[0], &kc[1]], sample_res) {
        out.violations.push(StepViolation::Tiling(m));
    }
    let g = input.gamma;
    let inside = if g.points().len() == 1 {
        crate::geom::point_in_closure(&pc, g.tail())
    } else {
        g.segments().all(|s| segment_in_closure(&pc, &s.tail, &s.head))
    };
    if !inside || !point_on_boundary(&pc, g.tail()) || !point_on_boundary(&pc, g.head()) {
        out.violations.push(StepViolation::GammaOutside);
    }
    if !g.contains_point(&input.ell.tail)
        || !g.contains_point(&input.ell.head)
        || !(input.ell.is_vertical() || input.ell.is_degenerate())
    {
        out.violations.push(StepViolation::P5(2));
    }
    let ell_chain = Chain::new(vec![input.ell.tail.clone(), input.ell.head.clone()]);
    out.lost =
        out.opt.iter().copied().filter(|p| !out.child_opt[0].contains(p) && !out.child_opt[1].contains(p)).collect();
    for &p in &out.opt {
        let on_gamma = chain_meets_polygon(g, &polys[p]);
        let on_ell = chain_meets_polygon(&ell_chain, &polys[p]);
        if (on_gamma || out.lost.contains(&p)) && !on_ell {
            out.violations.push(StepViolation::P2(p));
        }
        if input.protected.contains(&p) && (on_gamma || on_ell || out.lost.contains(&p)) {
            out.violations.push(StepViolation::P3(p));
        }
    }
    for i in 0..2 {
        if !in_some_cut(input.children[i], input.ell) {
            out.violations.push(StepViolation::P5(i));
        }
    }
    for &p in input.protected {
        let Some(i) = (0..2).find(|&i| out.child_opt[i].contains(&p)) else { continue };
        if !input.child_protected[i].contains(&p) {
            out.violations.push(StepViolation::Monotonicity(p));
        } else if find_protection(p, input.children[i], catalog).is_none() {
            out.violations.push(StepViolation::P4(p));
        }
    }
    for i in 0..2 {
        for &p in input.child_protected[i] {
            if input.protected.contains(&p) && out.child_opt[i].contains(&p) {
                continue;
            }
            if !out.child_opt[i].contains(&p) || find_protection(p, input.children[i], catalog).is_none() {
                out.violations.push(StepViolation::Unprotected(p));
            }
        }
    }
    out
}
