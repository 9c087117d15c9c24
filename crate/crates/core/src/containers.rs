//! Fences, structured containers and protection by fences.
//!
//! All geometry here lives in the normalized frame where `v_1 = (0, 1)` and
//! seeing is taken with respect to the option `(v_1, tail)`: `P` sees `Q`
//! when the lower end of the left edge of `Q` sits on the right edge of `P`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::charging::{seeing_relation, ChargingOption, SeeingRelation};
use crate::geom::{
    closed_curve_crosses, on_segment, orient, param_on, point_in_interior, remove_spurs_closed, segment_in_closure,
    segment_intersection, segment_meets_open_convex, signed_area2, winding_number, Chain, Point, Polygon, Rational,
    Segment, SegmentIntersection,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "L",
            Side::Right => "R",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FenceKind {
    Top,
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FenceSource {
    /// One polygon, or a pair where the first sees the second.
    Polygons(Vec<usize>),
    Synthetic,
}

/// A maximal curve of which every connected piece is a fence, oriented left
/// to right.
#[derive(Clone, Debug)]
pub struct Carrier {
    pub chain: Chain,
    pub kind: FenceKind,
    pub source: FenceSource,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fence {
    pub chain: Chain,
    pub kind: FenceKind,
    pub source: FenceSource,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ContainerError {
    #[error("boundary crosses itself")]
    CrossingFences,
    #[error("cutting line {0} overlaps the rest of the boundary")]
    CuttingLineOverlap(usize),
    #[error("too many segments or cutting lines: {0}")]
    TooManySegments(String),
    #[error("empty interior after spur removal")]
    EmptySpurInterior,
    #[error("bad orientation: {0}")]
    BadOrientation(String),
    #[error("boundary pieces do not connect at piece {0}")]
    Discontinuous(usize),
    #[error("fence {0} is not a fence")]
    NotAFence(usize),
}

/// Fence carriers of an instance: tops and bottoms of single polygons,
/// the two curves through every seeing pair, and synthetic box chains.
#[derive(Clone, Debug)]
pub struct FenceCatalog {
    pub polygons: Vec<Polygon>,
    pub seeing: SeeingRelation,
    pub carriers: Vec<Carrier>,
    max_segments: usize,
}

fn top_ltr(p: &Polygon) -> Chain {
    p.top_chain().reversed()
}

impl FenceCatalog {
    pub fn new(polygons: &[Polygon], synthetic: &[Chain]) -> Self {
        let seeing = seeing_relation(polygons, ChargingOption::V1_TAIL);
        let mut carriers = Vec::new();
        for (id, p) in polygons.iter().enumerate() {
            let src = FenceSource::Polygons(vec![id]);
            carriers.push(Carrier { chain: top_ltr(p), kind: FenceKind::Top, source: src.clone() });
            carriers.push(Carrier { chain: p.bot_chain(), kind: FenceKind::Bottom, source: src });
        }
        for (a, seen) in seeing.seen.iter().enumerate() {
            for &b in seen {
                let (p, q) = (&polygons[a], &polygons[b]);
                let src = FenceSource::Polygons(vec![a, b]);
                carriers.push(Carrier {
                    chain: top_ltr(p).concat(&top_ltr(q)),
                    kind: FenceKind::Top,
                    source: src.clone(),
                });
                carriers.push(Carrier {
                    chain: p.bot_chain().concat(&q.bot_chain()),
                    kind: FenceKind::Bottom,
                    source: src,
                });
            }
        }
        for c in synthetic {
            let kind = if c.tail().x <= c.head().x { FenceKind::Bottom } else { FenceKind::Top };
            let chain = if kind == FenceKind::Top { c.reversed() } else { c.clone() };
            carriers.push(Carrier { chain, kind, source: FenceSource::Synthetic });
        }
        let d = polygons.first().map_or(2, |p| p.ds().d());
        FenceCatalog { polygons: polygons.to_vec(), seeing, carriers, max_segments: 2 * d + 1 }
    }

    pub fn d(&self) -> usize {
        (self.max_segments - 1) / 2
    }

    /// The first carrier containing `chain`, if `chain` is a fence. Single
    /// points always count.
    pub fn recognize(&self, chain: &Chain) -> Option<usize> {
        if chain.is_degenerate() {
            return self.carriers.iter().position(|c| c.chain.contains_point(chain.tail())).or(Some(usize::MAX));
        }
        self.carriers.iter().position(|c| {
            (c.source == FenceSource::Synthetic || chain.num_segments() <= self.max_segments) && c.chain.covers(chain)
        })
    }

    pub fn fence(&self, chain: Chain) -> Option<Fence> {
        let k = self.recognize(&chain)?;
        Some(match self.carriers.get(k) {
            Some(c) => Fence { chain, kind: c.kind, source: c.source.clone() },
            None => Fence { chain, kind: FenceKind::Top, source: FenceSource::Synthetic },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuttingLine {
    pub seg: Segment,
    pub side: Side,
}

/// Boundary `s_1 f_1 … s_κ f_κ`; `f_j` runs from the head of `s_j` to the
/// tail of `s_{j+1}`. Left cutting lines come first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Container {
    pub cuts: Vec<CuttingLine>,
    pub fences: Vec<Fence>,
}

/// Role of one boundary segment while a container is being assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Cut,
    Fence,
}

impl Container {
    pub fn kappa(&self) -> usize {
        self.cuts.len()
    }

    pub fn num_left(&self) -> usize {
        self.cuts.iter().filter(|c| c.side == Side::Left).count()
    }

    /// Closed vertex cycle without the repeated first vertex.
    pub fn cycle(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = Vec::new();
        for (s, f) in self.cuts.iter().zip(&self.fences) {
            pts.push(s.seg.tail.clone());
            pts.push(s.seg.head.clone());
            pts.extend(f.chain.points().iter().cloned());
        }
        pts.dedup();
        while pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        pts
    }

    pub fn num_segments(&self) -> usize {
        self.cuts.iter().filter(|c| !c.seg.is_degenerate()).count()
            + self.fences.iter().map(|f| f.chain.num_segments()).sum::<usize>()
    }

    pub fn area2(&self) -> Rational {
        signed_area2(&self.cycle())
    }

    /// The boundary as role-tagged segments in order.
    pub fn tagged(&self) -> Vec<(Segment, Role)> {
        let mut out = Vec::new();
        for (s, f) in self.cuts.iter().zip(&self.fences) {
            if !s.seg.is_degenerate() {
                out.push((s.seg.clone(), Role::Cut));
            }
            out.extend(f.chain.segments().map(|g| (g, Role::Fence)));
        }
        out
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        point_in_interior(&self.cycle(), p)
    }

    /// Assembles a structured container from a closed, role-tagged boundary.
    /// Spurs are removed, fence runs are split into as few fences as
    /// possible (degenerate cutting lines at the joints), and degenerate
    /// cutting lines get a side such that left lines are consecutive.
    pub fn from_tagged(segs: &[(Segment, Role)], catalog: &FenceCatalog) -> Result<Container, ContainerError> {
        Container::from_tagged_with_joints(segs, catalog, &[])
    }

    /// Like [`Container::from_tagged`], but fence runs are also split at
    /// every point of `joints` they pass through.
    pub fn from_tagged_with_joints(
        segs: &[(Segment, Role)],
        catalog: &FenceCatalog,
        joints: &[Point],
    ) -> Result<Container, ContainerError> {
        let segs = remove_tagged_spurs(segs);
        if segs.len() < 3 {
            return Err(ContainerError::EmptySpurInterior);
        }
        let cycle: Vec<Point> = segs.iter().map(|(s, _)| s.tail.clone()).collect();
        if !signed_area2(&cycle).is_positive() {
            return Err(ContainerError::BadOrientation("not positively oriented".into()));
        }
        for (s, r) in &segs {
            if *r == Role::Cut && !s.is_vertical() {
                return Err(ContainerError::BadOrientation("cutting line not vertical".into()));
            }
        }
        let n = segs.len();
        let start = (0..n).find(|&k| segs[k].1 == Role::Cut && segs[(k + n - 1) % n].1 != Role::Cut).unwrap_or(0);
        let segs: Vec<(Segment, Role)> = (0..n).map(|k| segs[(start + k) % n].clone()).collect();

        let mut cuts: Vec<Segment> = Vec::new();
        let mut fences: Vec<Chain> = Vec::new();
        let mut k = 0;
        if segs[0].1 != Role::Cut {
            cuts.push(Segment::new(segs[0].0.tail.clone(), segs[0].0.tail.clone()));
        }
        while k < n {
            if segs[k].1 == Role::Cut {
                let tail = segs[k].0.tail.clone();
                while k < n && segs[k].1 == Role::Cut {
                    k += 1;
                }
                cuts.push(Segment::new(tail, segs[k - 1].0.head.clone()));
                if k == n {
                    // Only possible without fences at all.
                    return Err(ContainerError::BadOrientation("no fence".into()));
                }
            } else {
                let mut run: Vec<Point> = vec![segs[k].0.tail.clone()];
                while k < n && segs[k].1 == Role::Fence {
                    run.push(segs[k].0.head.clone());
                    k += 1;
                }
                let mut pieces = Vec::new();
                let mut from = 0;
                for i in 1..=run.len() - 1 {
                    if i == run.len() - 1 || joints.contains(&run[i]) {
                        let part = split_into_fences(&run[from..=i], catalog)
                            .ok_or(ContainerError::NotAFence(fences.len()))?;
                        pieces.extend(part);
                        from = i;
                    }
                }
                let m = pieces.len();
                for (i, piece) in pieces.into_iter().enumerate() {
                    if i + 1 < m {
                        let joint = piece.head().clone();
                        fences.push(piece);
                        cuts.push(Segment::new(joint.clone(), joint));
                    } else {
                        fences.push(piece);
                    }
                }
            }
        }
        debug_assert_eq!(cuts.len(), fences.len());
        let sides = assign_sides(&cuts)
            .ok_or_else(|| ContainerError::BadOrientation("left cutting lines not consecutive".into()))?;
        let kappa = cuts.len();
        let first_left =
            (0..kappa).find(|&j| sides[j] == Side::Left && sides[(j + kappa - 1) % kappa] == Side::Right).unwrap_or(0);
        let mut c = Container { cuts: Vec::with_capacity(kappa), fences: Vec::with_capacity(kappa) };
        for j in 0..kappa {
            let i = (first_left + j) % kappa;
            c.cuts.push(CuttingLine { seg: cuts[i].clone(), side: sides[i] });
            let f = catalog.fence(fences[i].clone()).ok_or(ContainerError::NotAFence(j))?;
            c.fences.push(f);
        }
        validate_container(&c, catalog.d())?;
        Ok(c)
    }

    /// The container bounded by a convex polygon given counterclockwise:
    /// vertical edges become cutting lines, the rest fences.
    pub fn from_convex(cycle: &[Point], catalog: &FenceCatalog) -> Result<Container, ContainerError> {
        let n = cycle.len();
        let segs: Vec<(Segment, Role)> = (0..n)
            .map(|k| {
                let s = Segment::new(cycle[k].clone(), cycle[(k + 1) % n].clone());
                let r = if s.is_vertical() { Role::Cut } else { Role::Fence };
                (s, r)
            })
            .collect();
        Container::from_tagged(&segs, catalog)
    }
}

/// Removes spurs from a closed tagged boundary; the surviving part of an
/// overlapping pair keeps the role of the segment it lies on.
fn remove_tagged_spurs(segs: &[(Segment, Role)]) -> Vec<(Segment, Role)> {
    let mut v: Vec<(Point, Role)> =
        segs.iter().filter(|(s, _)| !s.is_degenerate()).map(|(s, r)| (s.tail.clone(), *r)).collect();
    loop {
        let n = v.len();
        if n < 3 {
            break;
        }
        let mut changed = false;
        for k in 0..n {
            let a = &v[(k + n - 1) % n].0;
            let b = &v[k].0;
            let c = &v[(k + 1) % n].0;
            if a == b {
                v.remove(k);
                changed = true;
                break;
            }
            if orient(a, b, c) == Ordering::Equal && (a - b).inner(&(c - b)).is_positive() {
                // a -> b -> c doubles back; keep a -> c with the role of the
                // longer of the two.
                let ab = (b - a).inner(&(b - a));
                let bc = (c - b).inner(&(c - b));
                let role = if ab >= bc { v[(k + n - 1) % n].1 } else { v[k].1 };
                let pk = (k + n - 1) % n;
                v[pk].1 = role;
                v.remove(k);
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    let n = v.len();
    (0..n)
        .map(|k| (Segment::new(v[k].0.clone(), v[(k + 1) % n].0.clone()), v[k].1))
        .filter(|(s, _)| !s.is_degenerate())
        .collect()
}

/// Greedy split of an open run into fences, longest prefix first.
fn split_into_fences(run: &[Point], catalog: &FenceCatalog) -> Option<Vec<Chain>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start + 1 < run.len() {
        let mut end = start + 1;
        catalog.recognize(&Chain::new(run[start..=end].to_vec()))?;
        while end + 1 < run.len() && catalog.recognize(&Chain::new(run[start..=end + 1].to_vec())).is_some() {
            end += 1;
        }
        out.push(Chain::new(run[start..=end].to_vec()));
        start = end;
    }
    Some(out)
}

fn side_of(seg: &Segment) -> Option<Side> {
    match seg.head.y.cmp(&seg.tail.y) {
        Ordering::Less => Some(Side::Left),
        Ordering::Greater => Some(Side::Right),
        Ordering::Equal => None,
    }
}

fn sides_consecutive(sides: &[Side]) -> bool {
    let k = sides.len();
    let changes = (0..k).filter(|&j| sides[j] != sides[(j + 1) % k]).count();
    changes == 2
}

/// Fixed sides for proper cutting lines, a free choice for degenerate ones.
fn assign_sides(cuts: &[Segment]) -> Option<Vec<Side>> {
    let fixed: Vec<Option<Side>> = cuts.iter().map(side_of).collect();
    let free: Vec<usize> = (0..cuts.len()).filter(|&j| fixed[j].is_none()).collect();
    if free.len() > 12 {
        return None;
    }
    for mask in 0u32..(1 << free.len()) {
        let mut sides: Vec<Side> = fixed.iter().map(|s| s.unwrap_or(Side::Left)).collect();
        for (b, &j) in free.iter().enumerate() {
            sides[j] = if mask >> b & 1 == 1 { Side::Right } else { Side::Left };
        }
        if sides_consecutive(&sides) {
            return Some(sides);
        }
    }
    None
}

/// Structural container checks.
pub fn validate_container(c: &Container, d: usize) -> Result<(), ContainerError> {
    let kappa = c.kappa();
    if kappa != c.fences.len() {
        return Err(ContainerError::TooManySegments("cutting lines and fences do not alternate".into()));
    }
    if kappa > 5 {
        return Err(ContainerError::TooManySegments(format!("kappa = {kappa}")));
    }
    if kappa < 2 {
        return Err(ContainerError::BadOrientation(format!("kappa = {kappa}")));
    }
    if c.num_segments() > 10 * d + 10 {
        return Err(ContainerError::TooManySegments(format!("{} segments", c.num_segments())));
    }
    for j in 0..kappa {
        let s = &c.cuts[j];
        let f = &c.fences[j];
        if &s.seg.head != f.chain.tail() {
            return Err(ContainerError::Discontinuous(j));
        }
        if f.chain.head() != &c.cuts[(j + 1) % kappa].seg.tail {
            return Err(ContainerError::Discontinuous(j));
        }
        if !s.seg.is_vertical() && !s.seg.is_degenerate() {
            return Err(ContainerError::BadOrientation(format!("cutting line {j} is not vertical")));
        }
        if let Some(side) = side_of(&s.seg) {
            if side != s.side {
                return Err(ContainerError::BadOrientation(format!("cutting line {j} has the wrong side tag")));
            }
        }
    }
    let sides: Vec<Side> = c.cuts.iter().map(|s| s.side).collect();
    if !sides_consecutive(&sides) || sides[0] != Side::Left {
        return Err(ContainerError::BadOrientation("left cutting lines are not consecutive".into()));
    }
    let tagged = c.tagged();
    let reduced = remove_spurs_closed(&c.cycle());
    if reduced.len() < 3 || signed_area2(&reduced).is_zero() {
        return Err(ContainerError::EmptySpurInterior);
    }
    if !signed_area2(&reduced).is_positive() {
        return Err(ContainerError::BadOrientation("not positively oriented".into()));
    }
    // Cutting lines: their interiors touch nothing else of the boundary.
    for (j, s) in c.cuts.iter().enumerate() {
        if s.seg.is_degenerate() {
            continue;
        }
        for (g, _) in &tagged {
            if g == &s.seg {
                continue;
            }
            let hit = match segment_intersection(&s.seg.tail, &s.seg.head, &g.tail, &g.head) {
                SegmentIntersection::None => false,
                SegmentIntersection::Point(p) => s.seg.interior_contains(&p),
                SegmentIntersection::Overlap(_, _) => true,
            };
            if hit {
                return Err(ContainerError::CuttingLineOverlap(j));
            }
        }
        for (i, t) in c.cuts.iter().enumerate() {
            if i != j && t.seg.is_degenerate() && s.seg.interior_contains(&t.seg.tail) {
                return Err(ContainerError::CuttingLineOverlap(j));
            }
        }
    }
    if closed_curve_crosses(&reduced) {
        return Err(ContainerError::CrossingFences);
    }
    Ok(())
}

/// Validation plus the structured-container requirement that every `f_j`
/// is a fence.
pub fn check_structured(c: &Container, catalog: &FenceCatalog) -> Result<(), ContainerError> {
    validate_container(c, catalog.d())?;
    for (j, f) in c.fences.iter().enumerate() {
        if catalog.recognize(&f.chain).is_none() {
            return Err(ContainerError::NotAFence(j));
        }
    }
    Ok(())
}

/// Whether the closed polygon lies in `C` with its interior inside the
/// interior of `C`.
pub fn polygon_in_container(cycle: &[Point], p: &Polygon) -> bool {
    let n = cycle.len();
    for k in 0..n {
        if segment_meets_open_convex(&cycle[k], &cycle[(k + 1) % n], p) {
            return false;
        }
    }
    let verts = p.vertices();
    let mut cx = Rational::zero();
    let mut cy = Rational::zero();
    for v in &verts {
        cx += &v.x;
        cy += &v.y;
    }
    let m = Rational::from_integer((verts.len() as i64).into());
    let c = Point::new(cx / &m, cy / m);
    winding_number(cycle, &c) != 0
}

/// Ids of polygons lying in the interior of `C`.
pub fn opt_in(c: &Container, polygons: &[Polygon]) -> Vec<usize> {
    let cycle = c.cycle();
    opt_in_cycle(&cycle, polygons)
}

pub fn opt_in_cycle(cycle: &[Point], polygons: &[Polygon]) -> Vec<usize> {
    (0..polygons.len()).filter(|&i| polygon_in_container(cycle, &polygons[i])).collect()
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("polygon {0} does not see polygon {1}")]
pub struct NotSeeing(pub usize, pub usize);

/// The top and bottom fences through `p` and `q` where `p` sees `q`, each
/// optionally clipped to the part between two of its points.
pub fn fence_between(
    polygons: &[Polygon],
    p: usize,
    q: usize,
    clip: Option<((Point, Point), (Point, Point))>,
) -> Result<(Fence, Fence), NotSeeing> {
    let (a, b) = (&polygons[p], &polygons[q]);
    if !crate::charging::sees(a, b, ChargingOption::V1_TAIL) {
        return Err(NotSeeing(p, q));
    }
    let mut top = top_ltr(a).concat(&top_ltr(b));
    let mut bot = a.bot_chain().concat(&b.bot_chain());
    if let Some(((t0, t1), (b0, b1))) = clip {
        top = sub_chain(&top, &t0, &t1).ok_or(NotSeeing(p, q))?;
        bot = sub_chain(&bot, &b0, &b1).ok_or(NotSeeing(p, q))?;
    }
    let src = FenceSource::Polygons(vec![p, q]);
    Ok((
        Fence { chain: top, kind: FenceKind::Top, source: src.clone() },
        Fence { chain: bot, kind: FenceKind::Bottom, source: src },
    ))
}

/// Position of a point along a chain: segment index and parameter.
pub fn chain_pos(c: &Chain, p: &Point) -> Option<(usize, Rational)> {
    let k = c.locate(p)?;
    if c.points().len() == 1 {
        return Some((0, Rational::zero()));
    }
    Some((k, param_on(&c.points()[k], &c.points()[k + 1], p)))
}

/// The part of `c` between two of its points, in the direction of `c`
/// (swapped if `to` comes first).
pub fn sub_chain(c: &Chain, from: &Point, to: &Point) -> Option<Chain> {
    let a = chain_pos(c, from)?;
    let b = chain_pos(c, to)?;
    if a <= b {
        Some(c.slice((a.0, from), (b.0, to)))
    } else {
        Some(c.slice((b.0, to), (a.0, from)).reversed())
    }
}

/// Points where a chain meets a (possibly degenerate) segment; overlaps
/// contribute their two ends.
pub fn chain_meets_segment(c: &Chain, s: &Segment) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    if s.is_degenerate() {
        if c.contains_point(&s.tail) {
            out.push(s.tail.clone());
        }
        return out;
    }
    for g in c.segments() {
        match segment_intersection(&g.tail, &g.head, &s.tail, &s.head) {
            SegmentIntersection::None => {}
            SegmentIntersection::Point(p) => out.push(p),
            SegmentIntersection::Overlap(p, q) => {
                out.push(p);
                out.push(q);
            }
        }
    }
    if c.points().len() == 1 && on_segment(&s.tail, &s.head, c.tail()) {
        out.push(c.tail().clone());
    }
    out.dedup();
    out
}

/// Evidence that a polygon is protected by fences in a container.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtectionWitness {
    pub polygon: usize,
    pub side: Side,
    pub via: Segment,
    pub top: Chain,
    pub bottom: Chain,
}

/// Endpoint the fence of the given kind must end in.
fn protection_target(p: &Polygon, side: Side, kind: FenceKind) -> Point {
    let d = p.ds().d();
    match (side, kind) {
        (Side::Left, FenceKind::Top) => p.head(0).clone(),
        (Side::Left, FenceKind::Bottom) => p.tail(0).clone(),
        (Side::Right, FenceKind::Top) => p.tail(d).clone(),
        (Side::Right, FenceKind::Bottom) => p.head(d).clone(),
    }
}

fn own_chain(p: &Polygon, kind: FenceKind) -> Chain {
    match kind {
        FenceKind::Top => top_ltr(p),
        FenceKind::Bottom => p.bot_chain(),
    }
}

fn chain_in_closure(cycle: &[Point], c: &Chain) -> bool {
    if c.points().len() == 1 {
        return crate::geom::point_in_closure(cycle, c.tail());
    }
    c.segments().all(|s| segment_in_closure(cycle, &s.tail, &s.head))
}

/// A fence of the given kind from `via` to the protection target of
/// polygon `pid`, containing the polygon's own top or bottom.
fn find_fence(
    catalog: &FenceCatalog,
    cycle: &[Point],
    pid: usize,
    side: Side,
    kind: FenceKind,
    via: &Segment,
) -> Option<Chain> {
    let p = &catalog.polygons[pid];
    let target = protection_target(p, side, kind);
    let own = own_chain(p, kind);
    for carrier in catalog.carriers.iter().filter(|c| c.kind == kind) {
        let k = &carrier.chain;
        let Some(tpos) = chain_pos(k, &target) else { continue };
        if !k.covers(&own) {
            continue;
        }
        let mut starts: Vec<(Point, (usize, Rational))> = chain_meets_segment(k, via)
            .into_iter()
            .filter_map(|u| chain_pos(k, &u).map(|pos| (u, pos)))
            .filter(|(_, pos)| match side {
                Side::Left => *pos <= tpos,
                Side::Right => *pos >= tpos,
            })
            .collect();
        // Closest to the target first.
        match side {
            Side::Left => starts.sort_by(|a, b| b.1.cmp(&a.1)),
            Side::Right => starts.sort_by(|a, b| a.1.cmp(&b.1)),
        }
        for (u, _) in starts {
            let Some(sub) = sub_chain(k, &u, &target) else { continue };
            if sub.covers(&own) && chain_in_closure(cycle, &sub) {
                return Some(sub);
            }
        }
    }
    None
}

/// Looks for fences protecting polygon `pid` in `C` from the left or the
/// right, trying every cutting line of the matching side.
pub fn find_protection(pid: usize, c: &Container, catalog: &FenceCatalog) -> Option<ProtectionWitness> {
    let cycle = c.cycle();
    for side in [Side::Left, Side::Right] {
        for s in c.cuts.iter().filter(|s| s.side == side) {
            let Some(top) = find_fence(catalog, &cycle, pid, side, FenceKind::Top, &s.seg) else { continue };
            let Some(bottom) = find_fence(catalog, &cycle, pid, side, FenceKind::Bottom, &s.seg) else { continue };
            return Some(ProtectionWitness { polygon: pid, side, via: s.seg.clone(), top, bottom });
        }
    }
    None
}

/// Re-checks a witness against the definition, without searching.
pub fn verify_witness(w: &ProtectionWitness, c: &Container, catalog: &FenceCatalog) -> bool {
    let Some(p) = catalog.polygons.get(w.polygon) else { return false };
    if !c.cuts.iter().any(|s| s.seg == w.via && s.side == w.side) {
        return false;
    }
    let cycle = c.cycle();
    for (kind, chain) in [(FenceKind::Top, &w.top), (FenceKind::Bottom, &w.bottom)] {
        let target = protection_target(p, w.side, kind);
        let ends_ok = (chain.head() == &target && w.via.contains(chain.tail()))
            || (chain.tail() == &target && w.via.contains(chain.head()));
        let carrier_ok = catalog.carriers.iter().any(|k| {
            k.kind == kind
                && (k.source == FenceSource::Synthetic || chain.num_segments() <= 2 * catalog.d() + 1)
                && k.chain.covers(chain)
        });
        if !ends_ok || !carrier_ok || !chain.covers(&own_chain(p, kind)) || !chain_in_closure(&cycle, chain) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, DirectionSystem, Vector};
    use std::sync::Arc;

    fn square_ds() -> Arc<DirectionSystem> {
        Arc::new(DirectionSystem::new(&[Vector::new(0, 1), Vector::new(-1, 0)]).unwrap())
    }

    fn rect(ds: &Arc<DirectionSystem>, x0: i64, y0: i64, x1: i64, y1: i64) -> Polygon {
        Polygon::new(ds.clone(), vec![rat(x1), rat(y1), rat(-x0), rat(-y0)]).unwrap()
    }

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()
    }

    #[test]
    fn rectangle_container() {
        let ds = square_ds();
        let boxc = pts(&[(0, 0), (10, 0), (10, 10), (0, 10)]);
        let cat = FenceCatalog::new(
            &[rect(&ds, 1, 1, 3, 3)],
            &[Chain::new(pts(&[(0, 0), (10, 0)])), Chain::new(pts(&[(10, 10), (0, 10)]))],
        );
        let c = Container::from_convex(&boxc, &cat).unwrap();
        assert_eq!(c.kappa(), 2);
        assert_eq!(c.cuts[0].side, Side::Left);
        assert_eq!(opt_in(&c, &cat.polygons), vec![0]);
    }

    #[test]
    fn crossing_boundary_rejected() {
        let ds = square_ds();
        let cat = FenceCatalog::new(&[rect(&ds, 0, 0, 1, 1)], &[]);
        let bow = Container {
            cuts: vec![
                CuttingLine { seg: Segment::new(Point::from_ints(0, 2), Point::from_ints(0, 0)), side: Side::Left },
                CuttingLine { seg: Segment::new(Point::from_ints(2, 2), Point::from_ints(2, 0)), side: Side::Right },
            ],
            fences: vec![
                Fence {
                    chain: Chain::new(pts(&[(0, 0), (2, 2)])),
                    kind: FenceKind::Top,
                    source: FenceSource::Synthetic,
                },
                Fence {
                    chain: Chain::new(pts(&[(2, 0), (0, 2)])),
                    kind: FenceKind::Top,
                    source: FenceSource::Synthetic,
                },
            ],
        };
        assert!(validate_container(&bow, cat.d()).is_err());
    }

    #[test]
    fn seeing_pair_fences() {
        let ds = square_ds();
        let polys = vec![rect(&ds, 0, 0, 2, 2), rect(&ds, 2, 1, 4, 4)];
        let (top, bot) = fence_between(&polys, 0, 1, None).unwrap();
        assert_eq!(top.chain.points(), &pts(&[(0, 2), (2, 2), (2, 4), (4, 4)])[..]);
        assert_eq!(bot.chain.points(), &pts(&[(0, 0), (2, 0), (2, 1), (4, 1)])[..]);
        assert!(fence_between(&polys, 1, 0, None).is_err());
    }

    #[test]
    fn own_top_and_bottom_protect_from_the_right() {
        let ds = square_ds();
        let polys = vec![rect(&ds, 0, 1, 2, 3), rect(&ds, 3, 3, 5, 5)];
        let cat = FenceCatalog::new(&polys, &[]);
        // Container whose right cutting line contains the right edge of polygon 0.
        let c = Container::from_tagged(
            &[
                (Segment::new(Point::from_ints(-1, 5), Point::from_ints(-1, 0)), Role::Cut),
                (Segment::new(Point::from_ints(-1, 0), Point::from_ints(2, 0)), Role::Fence),
                (Segment::new(Point::from_ints(2, 0), Point::from_ints(2, 5)), Role::Cut),
                (Segment::new(Point::from_ints(2, 5), Point::from_ints(-1, 5)), Role::Fence),
            ],
            &FenceCatalog::new(&polys, &[Chain::new(pts(&[(-1, 0), (2, 0)])), Chain::new(pts(&[(-1, 5), (2, 5)]))]),
        )
        .unwrap();
        let w = find_protection(0, &c, &cat).unwrap();
        assert_eq!(w.side, Side::Right);
        assert!(verify_witness(&w, &c, &cat));
    }
}
