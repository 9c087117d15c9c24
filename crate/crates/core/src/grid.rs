//! Lazy grid hierarchy. Points and lines carry their derivation instead of
//! being looked up in a materialized grid.
//!
//! A level-0 point is an anchor vertex (an input polygon vertex or a vertex
//! of the bounding box). A line through a level-`k` point in one of the `d`
//! directions has level `k + 1`; the intersection of two non-parallel lines
//! has the larger of their levels.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{line_intersection, DirectionSystem, Point, Rational};
use crate::instance::Instance;

#[derive(Debug)]
pub enum Provenance {
    Anchor,
    Meet(Arc<GridLine>, Arc<GridLine>),
}

#[derive(Debug)]
pub struct GridPoint {
    pub point: Point,
    pub level: u32,
    pub provenance: Provenance,
}

/// Line `{x : x·n_dir = offset}` with `dir < d`.
#[derive(Debug)]
pub struct GridLine {
    pub dir: usize,
    pub offset: Rational,
    pub level: u32,
    pub anchor: Arc<GridPoint>,
}

impl GridPoint {
    pub fn anchor(point: Point) -> Arc<GridPoint> {
        Arc::new(GridPoint { point, level: 0, provenance: Provenance::Anchor })
    }

    pub fn meet(ds: &DirectionSystem, a: &Arc<GridLine>, b: &Arc<GridLine>) -> Option<Arc<GridPoint>> {
        let point = line_intersection(ds.normal(a.dir), &a.offset, ds.normal(b.dir), &b.offset)?;
        Some(Arc::new(GridPoint {
            point,
            level: a.level.max(b.level),
            provenance: Provenance::Meet(a.clone(), b.clone()),
        }))
    }
}

impl GridLine {
    /// Line in direction `i` (taken modulo `d`) through `anchor`.
    pub fn through(ds: &DirectionSystem, i: usize, anchor: &Arc<GridPoint>) -> Arc<GridLine> {
        let dir = ds.idx(i) % ds.d();
        Arc::new(GridLine {
            dir,
            offset: anchor.point.dot(ds.normal(dir)),
            level: anchor.level + 1,
            anchor: anchor.clone(),
        })
    }

    /// Support value of this line seen as constraint `i` (`i` or `i + d`).
    pub fn support_for(&self, ds: &DirectionSystem, i: usize) -> Rational {
        if ds.idx(i) < ds.d() {
            self.offset.clone()
        } else {
            -self.offset.clone()
        }
    }

    pub fn contains(&self, ds: &DirectionSystem, p: &Point) -> bool {
        p.dot(ds.normal(self.dir)) == self.offset
    }
}

/// Segment with optional provenance; degenerate segments need no line.
#[derive(Clone, Debug)]
pub struct GridSegment {
    pub line: Option<Arc<GridLine>>,
    pub tail: Option<Arc<GridPoint>>,
    pub head: Option<Arc<GridPoint>>,
}

pub enum GridObject<'a> {
    Point(&'a Arc<GridPoint>),
    Line(&'a Arc<GridLine>),
    Segment(&'a GridSegment),
    Chain(&'a [GridSegment]),
}

/// Level-1 lines: every direction through every distinct polygon vertex.
/// Returned sorted by `(dir, offset)`.
pub fn level1_lines(inst: &Instance) -> Vec<Arc<GridLine>> {
    let ds = &inst.ds;
    let mut out: BTreeMap<(usize, Rational), Arc<GridLine>> = BTreeMap::new();
    for poly in &inst.polygons {
        for v in poly.vertices() {
            let anchor = GridPoint::anchor(v);
            for dir in 0..ds.d() {
                let line = GridLine::through(ds, dir, &anchor);
                out.entry((dir, line.offset.clone())).or_insert(line);
            }
        }
    }
    out.into_values().collect()
}

/// Checks derivations against a fixed set of anchor points.
pub struct Certifier<'a> {
    ds: &'a DirectionSystem,
    anchors: HashSet<Point>,
    // Entries hold a clone of the Arc so a key is never reused while cached.
    points: HashMap<*const GridPoint, (Arc<GridPoint>, Option<u32>)>,
    lines: HashMap<*const GridLine, (Arc<GridLine>, Option<u32>)>,
}

impl<'a> Certifier<'a> {
    pub fn new(ds: &'a DirectionSystem, anchors: impl IntoIterator<Item = Point>) -> Self {
        Certifier { ds, anchors: anchors.into_iter().collect(), points: HashMap::new(), lines: HashMap::new() }
    }

    /// Anchors are all input vertices and all bounding box vertices.
    pub fn for_instance(inst: &'a Instance) -> Self {
        let mut anchors: Vec<Point> = inst.polygons.iter().flat_map(|p| p.vertices()).collect();
        anchors.extend(inst.bbox.vertices());
        Certifier::new(&inst.ds, anchors)
    }

    /// Verified derivation depth of a point, or `None` if the derivation is
    /// inconsistent.
    pub fn point_level(&mut self, p: &Arc<GridPoint>) -> Option<u32> {
        let key = Arc::as_ptr(p);
        if let Some((_, v)) = self.points.get(&key) {
            return *v;
        }
        let v = match &p.provenance {
            Provenance::Anchor => self.anchors.contains(&p.point).then_some(0),
            Provenance::Meet(a, b) => {
                let la = self.line_level(a);
                let lb = self.line_level(b);
                match (la, lb) {
                    (Some(la), Some(lb))
                        if a.dir != b.dir && a.contains(self.ds, &p.point) && b.contains(self.ds, &p.point) =>
                    {
                        Some(la.max(lb))
                    }
                    _ => None,
                }
            }
        };
        self.points.insert(key, (p.clone(), v));
        v
    }

    pub fn line_level(&mut self, l: &Arc<GridLine>) -> Option<u32> {
        let key = Arc::as_ptr(l);
        if let Some((_, v)) = self.lines.get(&key) {
            return *v;
        }
        let v = if l.dir < self.ds.d() && l.contains(self.ds, &l.anchor.point) {
            self.point_level(&l.anchor).map(|k| k + 1)
        } else {
            None
        };
        self.lines.insert(key, (l.clone(), v));
        v
    }

    fn segment_ok(&mut self, s: &GridSegment, k: u32) -> Result<bool> {
        let (tail, head) = match (&s.tail, &s.head) {
            (Some(t), Some(h)) => (t, h),
            _ => return Err(Error::MissingProvenance),
        };
        let ends =
            matches!(self.point_level(tail), Some(l) if l <= k) && matches!(self.point_level(head), Some(l) if l <= k);
        if tail.point == head.point {
            return Ok(ends);
        }
        let line = s.line.as_ref().ok_or(Error::MissingProvenance)?;
        Ok(ends
            && matches!(self.line_level(line), Some(l) if l <= k)
            && line.contains(self.ds, &tail.point)
            && line.contains(self.ds, &head.point))
    }

    /// True iff the derivation is valid with depth at most `k`.
    pub fn certify(&mut self, obj: GridObject<'_>, k: u32) -> Result<bool> {
        match obj {
            GridObject::Point(p) => Ok(matches!(self.point_level(p), Some(l) if l <= k)),
            GridObject::Line(l) => Ok(matches!(self.line_level(l), Some(m) if m <= k)),
            GridObject::Segment(s) => self.segment_ok(s, k),
            GridObject::Chain(c) => {
                for s in c {
                    if !self.segment_ok(s, k)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// One-shot certification against the anchors of `inst`.
pub fn certify_on_grid(inst: &Instance, obj: GridObject<'_>, k: u32) -> Result<bool> {
    Certifier::for_instance(inst).certify(obj, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat;

    #[test]
    fn derivation_levels() {
        let ds = DirectionSystem::axis();
        let a = GridPoint::anchor(Point::from_ints(0, 0));
        let b = GridPoint::anchor(Point::from_ints(2, 3));
        let va = GridLine::through(&ds, 0, &a);
        let hb = GridLine::through(&ds, 1, &b);
        let p = GridPoint::meet(&ds, &va, &hb).unwrap();
        assert_eq!(p.point, Point::from_ints(0, 3));
        let mut c = Certifier::new(&ds, [a.point.clone(), b.point.clone()]);
        assert_eq!(c.point_level(&p), Some(1));
        let l2 = GridLine::through(&ds, 3, &p);
        assert_eq!(l2.support_for(&ds, 3), rat(-3));
        assert!(c.certify(GridObject::Line(&l2), 2).unwrap());
        assert!(!c.certify(GridObject::Line(&l2), 1).unwrap());
        assert!(c.certify(GridObject::Line(&l2), 5).unwrap());
    }

    #[test]
    fn forged_anchor_fails() {
        let ds = DirectionSystem::axis();
        let fake = GridPoint::anchor(Point::from_ints(9, 9));
        let mut c = Certifier::new(&ds, [Point::from_ints(0, 0)]);
        assert!(!c.certify(GridObject::Point(&fake), 3).unwrap());
        let seg = GridSegment { line: None, tail: Some(fake.clone()), head: None };
        assert!(matches!(c.certify(GridObject::Segment(&seg), 3), Err(Error::MissingProvenance)));
    }
}
