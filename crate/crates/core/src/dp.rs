//! The container dynamic program over a restricted, desk-scale container
//! family, certificate replay, and an exact branch-and-bound solver.
//!
//! Containers are closed polygons whose edges lie on grid lines. A
//! bipartition is a chain of at most `max_fence_segs` grid segments that
//! starts and ends on the boundary and otherwise runs through the interior.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Signed;

use crate::containers::polygon_in_container;
use crate::geom::{
    line_intersection, orient, point_in_interior, segment_intersection, signed_area2, Point, Polygon, Rational,
    SegmentIntersection,
};
use crate::instance::conflict_graph;
use crate::partitioner::RecursivePartition;
use crate::{Error, Instance, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpParams {
    /// 1: lines through input and box vertices; each further level adds
    /// lines through intersections of the previous level.
    pub grid_level: u32,
    /// Segments per separating chain.
    pub max_fence_segs: usize,
    /// Maximal vertical boundary runs per container.
    pub max_cuts: usize,
    /// Boundary segments per container.
    pub max_boundary: usize,
    /// Containers plus enumerated chains before giving up.
    pub budget: usize,
}

impl DpParams {
    /// Single grid segments as separating curves.
    pub fn guillotine() -> Self {
        DpParams { grid_level: 1, max_fence_segs: 1, max_cuts: 5, max_boundary: 64, budget: 50_000_000 }
    }
}

impl Default for DpParams {
    fn default() -> Self {
        DpParams { grid_level: 1, max_fence_segs: 2, max_cuts: 5, max_boundary: 24, budget: 2_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpResult {
    /// Chosen polygon ids, sorted.
    pub ids: Vec<usize>,
    /// Distinct containers evaluated.
    pub cells: usize,
    /// Enumerated objects (containers and chains) charged to the budget.
    pub work: usize,
}

struct Grid {
    /// Line `(dir, offset)` → grid points on it, sorted along `v_dir`.
    lines: BTreeMap<(usize, Rational), Vec<Point>>,
    /// Grid point → lines through it.
    through: HashMap<Point, Vec<(usize, Rational)>>,
}

impl Grid {
    /// Grid points strictly inside segment `ab`.
    fn between(&self, a: &Point, b: &Point) -> Vec<Point> {
        let shared = self.through.get(a).and_then(|la| {
            let lb = self.through.get(b)?;
            la.iter().find(|k| lb.contains(k))
        });
        if let Some(key) = shared {
            let pts = &self.lines[key];
            let i = pts.iter().position(|q| q == a).expect("grid point on its line");
            let j = pts.iter().position(|q| q == b).expect("grid point on its line");
            return pts[i.min(j) + 1..i.max(j)].to_vec();
        }
        self.lines.values().flatten().filter(|q| crate::geom::in_segment_interior(a, b, q)).cloned().collect()
    }
}

fn build_grid(inst: &Instance, level: u32) -> Grid {
    let ds = &inst.ds;
    let mut anchors: BTreeSet<Point> = inst.polygons.iter().flat_map(|p| p.vertices()).collect();
    anchors.extend(inst.bbox.vertices());
    let mut offsets: BTreeSet<(usize, Rational)> = BTreeSet::new();
    for _ in 0..level.max(1) {
        for a in &anchors {
            for dir in 0..ds.d() {
                offsets.insert((dir, a.dot(ds.normal(dir))));
            }
        }
        let ls: Vec<&(usize, Rational)> = offsets.iter().collect();
        let mut next = anchors.clone();
        for (i, a) in ls.iter().enumerate() {
            for b in &ls[i + 1..] {
                if a.0 == b.0 {
                    continue;
                }
                if let Some(p) = line_intersection(ds.normal(a.0), &a.1, ds.normal(b.0), &b.1) {
                    if inst.bbox.contains_closed(&p) {
                        next.insert(p);
                    }
                }
            }
        }
        anchors = next;
    }
    let mut lines: BTreeMap<(usize, Rational), Vec<Point>> = offsets.iter().map(|k| (k.clone(), Vec::new())).collect();
    let mut through: HashMap<Point, Vec<(usize, Rational)>> = HashMap::new();
    for p in &anchors {
        for dir in 0..ds.d() {
            let key = (dir, p.dot(ds.normal(dir)));
            if let Some(v) = lines.get_mut(&key) {
                v.push(p.clone());
                through.entry(p.clone()).or_default().push(key);
            }
        }
    }
    for (k, v) in lines.iter_mut() {
        let dv = ds.dir(k.0);
        v.sort_by_key(|p| p.dot(dv));
    }
    Grid { lines, through }
}

fn clean(mut pts: Vec<Point>) -> Vec<Point> {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let Some(k) = (0..n).find(|&k| {
            let (a, b, c) = (&pts[(k + n - 1) % n], &pts[k], &pts[(k + 1) % n]);
            // Only straight-through vertices.
            orient(a, b, c) == std::cmp::Ordering::Equal
                && (&b.x - &a.x) * (&c.x - &b.x) + (&b.y - &a.y) * (&c.y - &b.y) > Rational::from_integer(0.into())
        }) else {
            return pts;
        };
        pts.remove(k);
    }
}

/// Rotation starting at the smallest vertex.
fn canonical(pts: Vec<Point>) -> Vec<Point> {
    let k = (0..pts.len()).min_by(|&a, &b| pts[a].cmp(&pts[b])).unwrap_or(0);
    let mut out = pts[k..].to_vec();
    out.extend_from_slice(&pts[..k]);
    out
}

fn vertical_runs(cycle: &[Point]) -> usize {
    let n = cycle.len();
    (0..n).filter(|&k| cycle[k].x == cycle[(k + 1) % n].x).count()
}

/// Splits a cycle at boundary points `a` and `b` joined by the interior
/// chain `gamma` (from `a` to `b`).
fn split_cycle(cycle: &[Point], gamma: &[Point]) -> Option<(Vec<Point>, Vec<Point>)> {
    let a = &gamma[0];
    let b = gamma.last().unwrap();
    let n = cycle.len();
    let mut ring: Vec<Point> = Vec::with_capacity(n + 2);
    for k in 0..n {
        let (p, q) = (&cycle[k], &cycle[(k + 1) % n]);
        ring.push(p.clone());
        let mut mids: Vec<&Point> = [a, b].into_iter().filter(|x| crate::geom::in_segment_interior(p, q, x)).collect();
        mids.sort_by_key(|x| crate::geom::param_on(p, q, x));
        mids.dedup();
        ring.extend(mids.into_iter().cloned());
    }
    let ia = ring.iter().position(|p| p == a)?;
    let ib = ring.iter().position(|p| p == b)?;
    let m = ring.len();
    let arc = |from: usize, to: usize| {
        let mut out = Vec::new();
        let mut k = from;
        loop {
            out.push(ring[k].clone());
            if k == to {
                break;
            }
            k = (k + 1) % m;
        }
        out
    };
    // c1: gamma then boundary b -> a; c2: boundary a -> b then gamma back.
    let mut c1: Vec<Point> = gamma.to_vec();
    let back = arc(ib, ia);
    c1.extend(back[1..back.len() - 1].iter().cloned());
    let mut c2 = arc(ia, ib);
    c2.extend(gamma[1..gamma.len() - 1].iter().rev().cloned());
    Some((c1, c2))
}

type Boundary = BTreeMap<Point, Option<(Point, Point)>>;

struct Solver<'a> {
    inst: &'a Instance,
    grid: Grid,
    params: &'a DpParams,
    memo: HashMap<Vec<Point>, (usize, Option<(Vec<Point>, Vec<Point>)>, Option<usize>)>,
    work: usize,
}

impl<'a> Solver<'a> {
    /// Chains from boundary point `start`, each returned as its vertex list.
    ///
    /// `boundary` holds every grid point on the boundary of `cycle`, with
    /// the edge it lies inside when that is its only contact. Grid lines
    /// meet only at grid points, so a walk along a line can leave the
    /// interior only at one of them and only the first step off the
    /// boundary needs an interior test.
    fn chains(&mut self, cycle: &[Point], boundary: &Boundary, start: &Point) -> Result<Vec<Vec<Point>>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<Point>> = vec![vec![start.clone()]];
        while let Some(path) = stack.pop() {
            let p = path.last().unwrap().clone();
            let segs = path.len() - 1;
            let lines = self.grid.through.get(&p).cloned().unwrap_or_default();
            for key in lines {
                if segs > 0 {
                    // Turning requires a new direction.
                    let prev = &path[path.len() - 2];
                    if prev.dot(self.inst.ds.normal(key.0)) == key.1 {
                        continue;
                    }
                }
                let pts = &self.grid.lines[&key];
                let i = pts.iter().position(|q| q == &p).expect("grid point on its line");
                for step in [1isize, -1] {
                    let mut j = i as isize + step;
                    let mut prev = p.clone();
                    while j >= 0 && (j as usize) < pts.len() {
                        let q = &pts[j as usize];
                        let into = match boundary.get(&prev) {
                            None => true,
                            // The cycle is counterclockwise.
                            Some(Some((a, b))) => orient(a, b, q) == std::cmp::Ordering::Greater,
                            Some(None) => point_in_interior(cycle, &prev.midpoint(q)),
                        };
                        if !into {
                            break;
                        }
                        if path[..path.len() - 1].iter().any(|x| x == q) || crosses(&path, &p, q) {
                            break;
                        }
                        bump(&mut self.work, self.params.budget)?;
                        let mut next = path.clone();
                        next.push(q.clone());
                        if boundary.contains_key(q) {
                            out.push(next);
                            break;
                        }
                        if segs + 1 < self.params.max_fence_segs {
                            stack.push(next);
                        }
                        prev = q.clone();
                        j += step;
                    }
                }
            }
        }
        Ok(out)
    }

    fn solve(&mut self, cycle: Vec<Point>, cands: &[usize]) -> Result<usize> {
        if let Some(v) = self.memo.get(&cycle) {
            return Ok(v.0);
        }
        bump(&mut self.work, self.params.budget)?;
        let inside: Vec<usize> =
            cands.iter().copied().filter(|&p| polygon_in_container(&cycle, &self.inst.polygons[p])).collect();
        let base = usize::from(!inside.is_empty());
        if inside.len() <= 1 {
            self.memo.insert(cycle, (base, None, inside.first().copied()));
            return Ok(base);
        }
        let mut starts = Boundary::new();
        let n = cycle.len();
        for k in 0..n {
            starts.insert(cycle[k].clone(), None);
        }
        for k in 0..n {
            let (a, b) = (&cycle[k], &cycle[(k + 1) % n]);
            for q in self.grid.between(a, b) {
                let edge = (!starts.contains_key(&q)).then(|| (a.clone(), b.clone()));
                starts.insert(q, edge);
            }
        }
        let mut best = (base, None);
        let mut tried: BTreeSet<(Point, Point, Vec<Point>)> = BTreeSet::new();
        for s in starts.keys() {
            for gamma in self.chains(&cycle, &starts, s)? {
                let (a, b) = (gamma[0].clone(), gamma.last().unwrap().clone());
                let mut inner: Vec<Point> = gamma[1..gamma.len() - 1].to_vec();
                let key = if a <= b {
                    (a.clone(), b.clone(), inner.clone())
                } else {
                    inner.reverse();
                    (b.clone(), a.clone(), inner)
                };
                if !tried.insert(key) {
                    continue;
                }
                let Some((c1, c2)) = split_cycle(&cycle, &gamma) else { continue };
                let (c1, c2) = (canonical(clean(c1)), canonical(clean(c2)));
                if !self.admissible(&c1) || !self.admissible(&c2) {
                    continue;
                }
                let v1 = self.solve(c1.clone(), &inside)?;
                let v2 = self.solve(c2.clone(), &inside)?;
                if v1 + v2 > best.0 {
                    best = (v1 + v2, Some((c1, c2)));
                }
            }
        }
        let pick = if best.1.is_none() { inside.first().copied() } else { None };
        self.memo.insert(cycle, (best.0, best.1, pick));
        Ok(best.0)
    }

    fn admissible(&self, c: &[Point]) -> bool {
        c.len() >= 3
            && signed_area2(c).is_positive()
            && c.len() <= self.params.max_boundary
            && vertical_runs(c) <= self.params.max_cuts
    }

    fn collect(&self, cycle: &[Point], out: &mut Vec<usize>) {
        let Some((_, split, pick)) = self.memo.get(cycle) else { return };
        match split {
            Some((c1, c2)) => {
                self.collect(c1, out);
                self.collect(c2, out);
            }
            None => out.extend(pick.iter().copied()),
        }
    }
}

fn bump(work: &mut usize, budget: usize) -> Result<()> {
    *work += 1;
    if *work > budget {
        return Err(Error::BudgetExceeded);
    }
    Ok(())
}

fn crosses(path: &[Point], p: &Point, q: &Point) -> bool {
    // The new segment may only meet its predecessor, at `p`.
    path.windows(2)
        .take(path.len().saturating_sub(2))
        .any(|w| !matches!(segment_intersection(&w[0], &w[1], p, q), SegmentIntersection::None))
}

/// Runs the container DP from the bounding box.
pub fn dp_solve(inst: &Instance, params: &DpParams) -> Result<DpResult> {
    let grid = build_grid(inst, params.grid_level);
    let mut s = Solver { inst, grid, params, memo: HashMap::new(), work: 0 };
    let root = canonical(clean(inst.bbox.vertices()));
    let all: Vec<usize> = (0..inst.len()).collect();
    let value = s.solve(root.clone(), &all)?;
    let mut ids = Vec::new();
    s.collect(&root, &mut ids);
    ids.sort_unstable();
    debug_assert_eq!(ids.len(), value);
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            assert!(!inst.polygons[a].intersects(&inst.polygons[b])?, "dp output is not independent");
        }
    }
    Ok(DpResult { ids, cells: s.memo.len(), work: s.work })
}

/// Evaluates the DP restricted to the bipartitions of a certificate, with
/// the polygons of `inst` (same ids as the certified instance, each inside
/// its certified counterpart). The certificate should be verified first.
pub fn replay_certificate(inst: &Instance, rp: &RecursivePartition) -> Result<Vec<usize>> {
    if inst.len() != rp.instance.len() || inst.d() != rp.instance.d() {
        return Err(Error::InvalidCertificate("instance does not match the certificate".into()));
    }
    let polys: Vec<Polygon> = inst
        .polygons
        .iter()
        .map(|p| {
            let pts: Vec<Point> = p.vertices().iter().map(|v| rp.transform.apply(v)).collect();
            Polygon::hull_of(rp.instance.ds.clone(), &pts)
        })
        .collect::<std::result::Result<_, _>>()?;
    let nodes = &rp.nodes;
    if nodes.is_empty() {
        return Err(Error::InvalidCertificate("no nodes".into()));
    }
    // Children have larger ids than parents in builder output, but do not
    // rely on it: evaluate in post-order.
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![(0usize, false)];
    let mut seen = vec![false; nodes.len()];
    while let Some((k, done)) = stack.pop() {
        if done {
            order.push(k);
            continue;
        }
        if k >= nodes.len() || seen[k] {
            return Err(Error::InvalidCertificate(format!("node {k} is not part of a tree")));
        }
        seen[k] = true;
        stack.push((k, true));
        if let Some(s) = &nodes[k].step {
            stack.extend(s.children.iter().map(|&c| (c, false)));
        }
    }
    let mut val: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for k in order {
        let cycle = nodes[k].container.cycle();
        let own: Vec<usize> = (0..polys.len()).filter(|&p| polygon_in_container(&cycle, &polys[p])).take(1).collect();
        let mut best = own;
        if let Some(s) = &nodes[k].step {
            let mut both: Vec<usize> = s.children.iter().flat_map(|&c| val[c].iter().copied()).collect();
            if both.len() > best.len() {
                both.sort_unstable();
                best = both;
            }
        }
        val[k] = best;
    }
    Ok(std::mem::take(&mut val[0]))
}

pub const EXACT_CAP: usize = 20;

/// Maximum independent set of the conflict graph by branch and bound.
pub fn exact_mis(inst: &Instance, cap: usize) -> Result<Vec<usize>> {
    let n = inst.len();
    if n > cap || n > 64 {
        return Err(Error::TooLarge { n, cap: cap.min(64) });
    }
    let adj = conflict_graph(inst).masks();
    let all: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = greedy(&adj, all);
    branch(&adj, all, 0, &mut best);
    Ok((0..n).filter(|&i| best & (1 << i) != 0).collect())
}

fn greedy(adj: &[u64], mut rest: u64) -> u64 {
    let mut out = 0;
    while rest != 0 {
        let v = (0..adj.len()).filter(|&i| rest & (1 << i) != 0).min_by_key(|&i| (adj[i] & rest).count_ones()).unwrap();
        out |= 1 << v;
        rest &= !(adj[v] | (1 << v));
    }
    out
}

fn branch(adj: &[u64], rest: u64, cur: u64, best: &mut u64) {
    if (cur | rest).count_ones() <= best.count_ones() {
        return;
    }
    // Vertices without neighbours in `rest` are always taken.
    let mut free = 0;
    let mut v = None;
    let mut deg = 0;
    for i in 0..adj.len() {
        if rest & (1 << i) == 0 {
            continue;
        }
        let d = (adj[i] & rest).count_ones();
        if d == 0 {
            free |= 1 << i;
        } else if d > deg {
            deg = d;
            v = Some(i);
        }
    }
    let cur = cur | free;
    let rest = rest & !free;
    let Some(v) = v.filter(|_| rest != 0) else {
        if cur.count_ones() > best.count_ones() {
            *best = cur;
        }
        return;
    };
    branch(adj, rest & !(adj[v] | (1 << v)), cur | (1 << v), best);
    branch(adj, rest & !(1 << v), cur, best);
}
