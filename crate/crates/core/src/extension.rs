//! Maximal extension of an independent set.
//!
//! Directions are processed in order `1 .. 2d`; within a direction the
//! polygons are grown one at a time in id order. A growing edge stops when
//! its interior reaches another polygon or the box (S2) or when it shrinks
//! to a point (S3). A corner contact (S1) adds the separating constraint and
//! growth continues. At equal support values S3 beats S2 beats S1.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::{
    clip, convex_area2, format_rational, line_intersection, rat, DirectionSystem, HalfPlane, Point, Polygon, Rational,
};
use crate::grid::{Certifier, GridLine, GridObject, GridPoint, GridSegment};
use crate::instance::{conflict_graph, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Witness {
    Polygon(usize),
    BBox,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Polygon(id) => write!(f, "{id}"),
            Witness::BBox => write!(f, "BBOX"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    S1,
    S2,
    S3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub polygon: usize,
    pub dir: usize,
    pub kind: EventKind,
    /// Support value `p_i` at the event.
    pub support: Rational,
    pub delta: Rational,
    pub witness: Option<Witness>,
    /// Constraint switched on by an S1 event.
    pub added: Option<usize>,
    /// A corner contact with no constraint to switch on, treated as a stop.
    pub fallback: bool,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "poly={} dir={} {:?} p={} delta={}",
            self.polygon,
            self.dir + 1,
            self.kind,
            format_rational(&self.support),
            format_rational(&self.delta)
        )?;
        if let Some(w) = self.witness {
            write!(f, " witness={w}")?;
        }
        if let Some(j) = self.added {
            write!(f, " added={}", j + 1)?;
        }
        if self.fallback {
            write!(f, " fallback")?;
        }
        Ok(())
    }
}

/// Convex obstacle given by closed half-planes.
struct Obstacle {
    witness: Witness,
    hps: Vec<HalfPlane>,
}

/// Support vectors with `None` as the `+inf` sentinel.
pub struct ExtensionState {
    ds: Arc<DirectionSystem>,
    bbox: Polygon,
    sup: Vec<Vec<Option<Rational>>>,
    lines: Vec<Vec<Option<Arc<GridLine>>>>,
    wall_lines: Vec<Arc<GridLine>>,
    pub log: Vec<Event>,
    /// S1 contacts for which no separating constraint could be switched on;
    /// growth stops there.
    pub fallbacks: usize,
}

/// Intersection of closed half-planes; must be bounded. Returns the vertex
/// list (possibly with fewer than three points if degenerate).
fn bounded_region(hps: &[HalfPlane]) -> Vec<Point> {
    let mut m = rat(1);
    for a in 0..hps.len() {
        for b in a + 1..hps.len() {
            if let Some(p) = line_intersection(hps[a].normal, &hps[a].offset, hps[b].normal, &hps[b].offset) {
                m = m.max(p.x.abs()).max(p.y.abs());
            }
        }
    }
    let m = m + rat(1);
    let mut pts = vec![
        Point::new(-m.clone(), -m.clone()),
        Point::new(m.clone(), -m.clone()),
        Point::new(m.clone(), m.clone()),
        Point::new(-m.clone(), m),
    ];
    for hp in hps {
        pts = clip(&pts, hp);
        if pts.is_empty() {
            break;
        }
    }
    pts
}

fn min_dot(pts: &[Point], n: crate::geom::Vector) -> Rational {
    pts.iter().map(|p| p.dot(n)).min().expect("non-empty")
}

fn max_dot(pts: &[Point], n: crate::geom::Vector) -> Rational {
    pts.iter().map(|p| p.dot(n)).max().expect("non-empty")
}

/// Parameter interval of `[a, b]` inside a closed convex set, as `(lo, hi)`
/// (empty if `lo > hi`).
fn segment_interval(a: &Point, b: &Point, hps: &[HalfPlane]) -> (Rational, Rational) {
    let mut lo = Rational::zero();
    let mut hi = rat(1);
    for hp in hps {
        let f0 = a.dot(hp.normal) - &hp.offset;
        let slope = b.dot(hp.normal) - a.dot(hp.normal);
        if slope.is_zero() {
            if f0.is_positive() {
                return (rat(1), rat(0));
            }
        } else {
            let root = -&f0 / &slope;
            if slope.is_positive() {
                hi = hi.min(root);
            } else {
                lo = lo.max(root);
            }
        }
    }
    (lo, hi)
}

impl ExtensionState {
    pub fn new(inst: &Instance) -> Result<Self> {
        inst.check_inside()?;
        inst.check_independent()?;
        let ds = inst.ds.clone();
        let m = ds.len();
        let mut sup = Vec::with_capacity(inst.len());
        let mut lines = Vec::with_capacity(inst.len());
        for p in &inst.polygons {
            let mut s = Vec::with_capacity(m);
            let mut l = Vec::with_capacity(m);
            for k in 0..m {
                if p.is_degenerate(k) {
                    s.push(None);
                    l.push(None);
                } else {
                    s.push(Some(p.support(k).clone()));
                    l.push(Some(GridLine::through(&ds, k, &GridPoint::anchor(p.tail(k).clone()))));
                }
            }
            sup.push(s);
            lines.push(l);
        }
        let wall_lines =
            (0..m).map(|k| GridLine::through(&ds, k, &GridPoint::anchor(inst.bbox.tail(k).clone()))).collect();
        Ok(ExtensionState { ds, bbox: inst.bbox.clone(), sup, lines, wall_lines, log: Vec::new(), fallbacks: 0 })
    }

    pub fn in_d(&self, p: usize, i: usize) -> bool {
        self.sup[p][self.ds.idx(i)].is_none()
    }

    fn halfplanes(&self, p: usize, skip: Option<usize>) -> Vec<HalfPlane> {
        (0..self.ds.len())
            .filter(|&k| Some(k) != skip)
            .filter_map(|k| self.sup[p][k].as_ref().map(|s| HalfPlane::new(self.ds.normal(k), s.clone())))
            .collect()
    }

    fn shape(&self, p: usize) -> Vec<Point> {
        bounded_region(&self.halfplanes(p, None))
    }

    fn obstacles(&self, p: usize, i: usize) -> Vec<Obstacle> {
        let mut out: Vec<Obstacle> = (0..self.sup.len())
            .filter(|&o| o != p)
            .map(|o| Obstacle { witness: Witness::Polygon(o), hps: self.halfplanes(o, None) })
            .collect();
        let d = self.ds.d();
        for k in 0..self.ds.len() {
            if k != i {
                // Outside of the box beyond wall k.
                out.push(Obstacle {
                    witness: Witness::BBox,
                    hps: vec![HalfPlane::new(self.ds.normal(k + d), -self.bbox.support(k).clone())],
                });
            }
        }
        out
    }

    /// First support value at which `obstacle` would be entered when
    /// growing along `n_i` inside `region`, if ever.
    fn threshold(&self, region: &[Point], obstacle: &Obstacle, i: usize) -> Option<Rational> {
        let mut r = region.to_vec();
        for hp in &obstacle.hps {
            r = clip(&r, hp);
            if r.len() < 3 {
                return None;
            }
        }
        convex_area2(&r).is_positive().then(|| min_dot(&r, self.ds.normal(i)))
    }

    fn region_without(&self, p: usize, i: usize, extra: Option<HalfPlane>) -> Vec<Point> {
        let mut hps = self.halfplanes(p, Some(i));
        hps.extend(extra);
        hps.push(HalfPlane::new(self.ds.normal(i), self.bbox.support(i) + rat(1)));
        bounded_region(&hps)
    }

    /// Computes the next event when growing `p` in direction `i` from its
    /// current support. Does not modify the state.
    pub fn next_event(&self, p: usize, i: usize) -> Event {
        let (event, _) = self.next_event_inner(p, i);
        event
    }

    fn next_event_inner(&self, p: usize, i: usize) -> (Event, Option<(usize, Rational, Arc<GridLine>)>) {
        let ds = &self.ds;
        let n = ds.normal(i);
        let cur = self.sup[p][i].clone().expect("growing a finite constraint");
        let region = self.region_without(p, i, None);
        let wall = self.bbox.support(i).clone();
        let tmax = max_dot(&region, n);
        let obstacles = self.obstacles(p, i);
        let thresholds: Vec<Option<Rational>> = obstacles.iter().map(|o| self.threshold(&region, o, i)).collect();
        let mut t = wall.clone().min(tmax.clone());
        for th in thresholds.iter().flatten() {
            t = t.min(th.clone());
        }
        debug_assert!(t >= cur, "state already intersects an obstacle");
        let delta = &t - &cur;
        let mk = |kind, witness, added| Event {
            polygon: p,
            dir: i,
            kind,
            support: t.clone(),
            delta: delta.clone(),
            witness,
            added,
            fallback: false,
        };
        if tmax == t {
            return (mk(EventKind::S3, None, None), None);
        }
        // Edge e_i at support t.
        let cut = clip(&region, &HalfPlane::new(n, t.clone()));
        let on: Vec<&Point> = cut.iter().filter(|q| q.dot(n) == t).collect();
        let v = ds.dir(i);
        let tail = on.iter().min_by_key(|q| q.dot(crate::geom::Vector::new(v.x, v.y))).expect("edge");
        let head = on.iter().max_by_key(|q| q.dot(crate::geom::Vector::new(v.x, v.y))).expect("edge");
        if t == wall {
            return (mk(EventKind::S2, Some(Witness::BBox), None), None);
        }
        let tied: Vec<usize> = (0..obstacles.len()).filter(|&k| thresholds[k].as_ref() == Some(&t)).collect();
        for &k in &tied {
            if let Witness::Polygon(_) = obstacles[k].witness {
                let (lo, hi) = segment_interval(tail, head, &obstacles[k].hps);
                if lo <= hi && lo < rat(1) && hi.is_positive() {
                    return (mk(EventKind::S2, Some(obstacles[k].witness), None), None);
                }
            }
        }
        // Corner contacts only: find a constraint to switch on.
        let body = cut;
        for &k in &tied {
            let ob = &obstacles[k];
            for j in 0..ds.len() {
                if j == i || j == ds.opposite(i) || self.sup[p][j].is_some() {
                    continue;
                }
                let Some((value, line)) = self.separator(ob, j) else { continue };
                if max_dot(&body, ds.normal(j)) != value {
                    continue;
                }
                let hp = HalfPlane::new(ds.normal(j), value.clone());
                let region2 = self.region_without(p, i, Some(hp));
                match self.threshold(&region2, ob, i) {
                    Some(th) if th <= t => continue,
                    _ => {}
                }
                return (mk(EventKind::S1, Some(ob.witness), Some(j)), Some((j, value, line)));
            }
        }
        // No separating constraint: stop here.
        let w = tied.first().map(|&k| obstacles[k].witness);
        let mut ev = mk(EventKind::S2, w, None);
        ev.fallback = true;
        (ev, None)
    }

    /// Support value and line of the constraint `j` of the growing polygon
    /// that separates it from `ob` (the obstacle's opposite constraint).
    fn separator(&self, ob: &Obstacle, j: usize) -> Option<(Rational, Arc<GridLine>)> {
        let ds = &self.ds;
        let jo = ds.opposite(j);
        match ob.witness {
            Witness::BBox => {
                // Wall obstacles carry the single half-plane of wall `k`.
                let hp = &ob.hps[0];
                let k = ds.opposite((0..ds.len()).find(|&k| ds.normal(k) == hp.normal)?);
                (k == j).then(|| (self.bbox.support(k).clone(), self.wall_lines[k].clone()))
            }
            Witness::Polygon(o) => match (&self.sup[o][jo], &self.lines[o][jo]) {
                (Some(s), Some(l)) => Some((-s.clone(), l.clone())),
                _ => {
                    let shape = self.shape(o);
                    let value = -max_dot(&shape, ds.normal(jo));
                    let vertex = self.vertex_on(o, ds.normal(jo), &-value.clone())?;
                    Some((value, GridLine::through(ds, j, &vertex)))
                }
            },
        }
    }

    /// Vertex of polygon `o` (with provenance) on the line `x·n = c`.
    fn vertex_on(&self, o: usize, n: crate::geom::Vector, c: &Rational) -> Option<Arc<GridPoint>> {
        let finite: Vec<usize> = (0..self.ds.len()).filter(|&k| self.sup[o][k].is_some()).collect();
        let hps = self.halfplanes(o, None);
        for (a, &ka) in finite.iter().enumerate() {
            let kb = finite[(a + 1) % finite.len()];
            let (la, lb) = (self.lines[o][ka].as_ref()?, self.lines[o][kb].as_ref()?);
            if let Some(gp) = GridPoint::meet(&self.ds, la, lb) {
                if &gp.point.dot(n) == c && hps.iter().all(|h| h.contains(&gp.point)) {
                    return Some(gp);
                }
            }
        }
        None
    }

    /// Grows polygon `p` in direction `i` until it stops.
    pub fn extend(&mut self, p: usize, i: usize) {
        if self.in_d(p, i) {
            return;
        }
        loop {
            let (event, s1) = self.next_event_inner(p, i);
            let t = event.support.clone();
            match event.kind {
                EventKind::S3 => {
                    self.sup[p][i] = None;
                    self.lines[p][i] = None;
                    self.log.push(event);
                    return;
                }
                EventKind::S2 => {
                    if event.fallback {
                        self.fallbacks += 1;
                    }
                    let line = if event.delta.is_zero() { self.lines[p][i].clone() } else { None }
                        .or_else(|| self.stop_line(&event));
                    self.sup[p][i] = Some(t);
                    self.lines[p][i] = line;
                    self.log.push(event);
                    return;
                }
                EventKind::S1 => {
                    let (j, value, line) = s1.expect("S1 carries its constraint");
                    if !event.delta.is_zero() {
                        self.lines[p][i] = None;
                    }
                    self.sup[p][i] = Some(t);
                    self.sup[p][j] = Some(value);
                    self.lines[p][j] = Some(line);
                    self.log.push(event);
                }
            }
        }
    }

    /// Grid line for a stop at `event.support`, taken from the witness.
    fn stop_line(&self, event: &Event) -> Option<Arc<GridLine>> {
        let ds = &self.ds;
        let i = event.dir;
        let io = ds.opposite(i);
        match event.witness? {
            Witness::BBox => {
                let l = self.wall_lines[i].clone();
                (l.support_for(ds, i) == event.support).then_some(l)
            }
            Witness::Polygon(o) => {
                if let Some(l) = &self.lines[o][io] {
                    if l.support_for(ds, i) == event.support {
                        return Some(l.clone());
                    }
                }
                let v = self.vertex_on(o, ds.normal(i), &event.support)?;
                Some(GridLine::through(ds, i, &v))
            }
        }
    }

    /// Runs the full sweep.
    pub fn run(&mut self) {
        for i in 0..self.ds.len() {
            for p in 0..self.sup.len() {
                self.extend(p, i);
            }
        }
    }

    /// Replaces sentinels by tight values and collects provenance.
    pub fn finish(self, original: &Instance) -> Result<ExtensionResult> {
        let ds = self.ds.clone();
        let m = ds.len();
        let mut polygons = Vec::with_capacity(self.sup.len());
        let mut lines_out = Vec::with_capacity(self.sup.len());
        let mut corners_out = Vec::with_capacity(self.sup.len());
        for p in 0..self.sup.len() {
            let shape = self.shape(p);
            let supports: Vec<Rational> =
                (0..m).map(|k| self.sup[p][k].clone().unwrap_or_else(|| max_dot(&shape, ds.normal(k)))).collect();
            let poly = Polygon::new(ds.clone(), supports).map_err(|source| Error::Polygon { id: p, source })?;
            // Lines of non-degenerate edges, then corners, then the lines of
            // degenerate edges through their vertex.
            let mut lines: Vec<Option<Arc<GridLine>>> = (0..m)
                .map(|k| {
                    if poly.is_degenerate(k) {
                        None
                    } else {
                        self.lines[p][k].clone().filter(|l| l.support_for(&ds, k) == *poly.support(k))
                    }
                })
                .collect();
            let live: Vec<usize> = (0..m).filter(|&k| !poly.is_degenerate(k)).collect();
            let mut corners: Vec<Option<Arc<GridPoint>>> = vec![None; m];
            for (a, &ka) in live.iter().enumerate() {
                let kb = live[(a + 1) % live.len()];
                if let (Some(la), Some(lb)) = (&lines[ka], &lines[kb]) {
                    let gp = GridPoint::meet(&ds, la, lb);
                    let mut k = ka;
                    loop {
                        corners[k] = gp.clone();
                        if k == ds.idx(kb + m - 1) {
                            break;
                        }
                        k = ds.idx(k + 1);
                    }
                }
            }
            for k in 0..m {
                if poly.is_degenerate(k) {
                    if let Some(v) = &corners[k] {
                        lines[k] = Some(GridLine::through(&ds, k, v));
                    }
                }
            }
            polygons.push(poly);
            lines_out.push(lines);
            corners_out.push(corners);
        }
        let instance = Instance { ds: ds.clone(), polygons, bbox: self.bbox.clone() };
        let witnesses = e4_witnesses(&instance);
        Ok(ExtensionResult {
            original: original.clone(),
            instance,
            lines: lines_out,
            corners: corners_out,
            witnesses,
            log: self.log,
            fallbacks: self.fallbacks,
        })
    }
}

/// For each non-degenerate edge, the smallest-id polygon whose closure meets
/// the edge interior, else `BBox` if the edge lies on the box boundary.
pub fn e4_witnesses(inst: &Instance) -> Vec<Vec<Option<Witness>>> {
    let ds = &inst.ds;
    let m = ds.len();
    let hps: Vec<Vec<HalfPlane>> = inst
        .polygons
        .iter()
        .map(|q| (0..m).map(|k| HalfPlane::new(ds.normal(k), q.support(k).clone())).collect())
        .collect();
    inst.polygons
        .iter()
        .enumerate()
        .map(|(p, poly)| {
            (0..m)
                .map(|k| {
                    if poly.is_degenerate(k) {
                        return None;
                    }
                    let (a, b) = (poly.tail(k), poly.head(k));
                    for (q, h) in hps.iter().enumerate() {
                        if q == p {
                            continue;
                        }
                        let (lo, hi) = segment_interval(a, b, h);
                        if lo <= hi && lo < rat(1) && hi.is_positive() {
                            return Some(Witness::Polygon(q));
                        }
                    }
                    (poly.support(k) == inst.bbox.support(k)).then_some(Witness::BBox)
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub original: Instance,
    /// Extended polygons; ids match the original.
    pub instance: Instance,
    /// Grid line of every edge, per polygon.
    pub lines: Vec<Vec<Option<Arc<GridLine>>>>,
    /// Grid point of every corner `h(e_k)`, per polygon.
    pub corners: Vec<Vec<Option<Arc<GridPoint>>>>,
    pub witnesses: Vec<Vec<Option<Witness>>>,
    pub log: Vec<Event>,
    pub fallbacks: usize,
}

pub fn maximal_extension(inst: &Instance) -> Result<ExtensionResult> {
    let mut state = ExtensionState::new(inst)?;
    state.run();
    state.finish(inst)
}

/// Outcome of the post-conditions check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtensionReport {
    pub independent: bool,
    pub on_grid: bool,
    pub max_level: u32,
    pub contained: bool,
    pub touching: bool,
    pub failures: Vec<String>,
}

impl ExtensionReport {
    pub fn ok(&self) -> bool {
        self.independent && self.on_grid && self.contained && self.touching
    }
}

/// Checks independence, grid certification at level `2d`, containment of
/// every original polygon in its extension, and the edge-contact property.
pub fn check_extension(res: &ExtensionResult) -> ExtensionReport {
    let inst = &res.instance;
    let ds = &inst.ds;
    let m = ds.len();
    let mut rep = ExtensionReport::default();
    let g = conflict_graph(inst);
    rep.independent = g.num_edges() == 0 && inst.check_inside().is_ok();
    if !rep.independent {
        rep.failures.push(format!("E1: {} intersecting pairs", g.num_edges()));
    }
    rep.contained =
        res.original.len() == inst.len() && res.original.polygons.iter().zip(&inst.polygons).all(|(a, b)| a.within(b));
    if !rep.contained {
        rep.failures.push("E2: some polygon shrank".into());
    }
    let mut cert = Certifier::for_instance(&res.original);
    let k = 2 * ds.d() as u32;
    rep.on_grid = true;
    for (p, poly) in inst.polygons.iter().enumerate() {
        for e in 0..m {
            if poly.is_degenerate(e) {
                continue;
            }
            let seg = GridSegment {
                line: res.lines[p][e].clone(),
                tail: res.corners[p][ds.idx(e + m - 1)].clone(),
                head: res.corners[p][e].clone(),
            };
            let ok = matches!(seg.tail.as_ref(), Some(t) if &t.point == poly.tail(e))
                && matches!(seg.head.as_ref(), Some(h) if &h.point == poly.head(e))
                && cert.certify(GridObject::Segment(&seg), k).unwrap_or(false);
            if let Some(l) = &seg.line {
                if let Some(lv) = cert.line_level(l) {
                    rep.max_level = rep.max_level.max(lv);
                }
            }
            if !ok {
                rep.on_grid = false;
                rep.failures.push(format!("E1: edge {} of polygon {p} not certified at level {k}", e + 1));
            }
        }
    }
    rep.touching = true;
    for (p, row) in res.witnesses.iter().enumerate() {
        for (e, w) in row.iter().enumerate() {
            if !inst.polygons[p].is_degenerate(e) && w.is_none() {
                rep.touching = false;
                rep.failures.push(format!("E4: edge {} of polygon {p} touches nothing", e + 1));
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse;

    #[test]
    fn single_square_fills_box() {
        let inst = parse("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 1\npoly 1 1 0 0\n").unwrap();
        let res = maximal_extension(&inst).unwrap();
        assert_eq!(res.instance.polygons[0], inst.bbox);
        assert!(check_extension(&res).ok());
        assert_eq!(res.log[0].kind, EventKind::S2);
        assert_eq!(res.log[0].delta, rat(1));
    }

    #[test]
    fn two_squares_meet() {
        let inst = parse("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 2\npoly 1 1 0 0\npoly 4 1 -3 0\n").unwrap();
        let res = maximal_extension(&inst).unwrap();
        let rep = check_extension(&res);
        assert!(rep.ok(), "{:?}", rep.failures);
        let a = &res.instance.polygons[0];
        let b = &res.instance.polygons[1];
        assert!(a.touches(b).unwrap());
        assert_eq!(a.support(0), &-b.support(2).clone());
    }
}
