//! Seeing relation, charging options, corner polygons and option selection.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::geom::{in_segment_interior, DirectionSystem, Point, Polygon, Vector};
use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anchor {
    Tail,
    Head,
}

/// Direction index `dir` (0-based, `< 2d`) and the anchor endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChargingOption {
    pub dir: usize,
    pub anchor: Anchor,
}

impl ChargingOption {
    pub const V1_TAIL: ChargingOption = ChargingOption { dir: 0, anchor: Anchor::Tail };

    pub fn all(ds: &DirectionSystem) -> Vec<ChargingOption> {
        (0..ds.len())
            .flat_map(|dir| [Anchor::Tail, Anchor::Head].map(|anchor| ChargingOption { dir, anchor }))
            .collect()
    }
}

impl fmt::Display for ChargingOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.anchor {
            Anchor::Tail => 't',
            Anchor::Head => 'h',
        };
        write!(f, "v{}{}", self.dir + 1, a)
    }
}

impl FromStr for ChargingOption {
    type Err = String;

    /// Parses the `v<i><t|h>` form written by `Display`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let body = s.strip_prefix('v').ok_or_else(|| format!("bad option {s:?}"))?;
        let (num, a) = body.split_at(body.len().saturating_sub(1));
        let anchor = match a {
            "t" => Anchor::Tail,
            "h" => Anchor::Head,
            _ => return Err(format!("bad option {s:?}")),
        };
        let i: usize = num.parse().map_err(|_| format!("bad option {s:?}"))?;
        if i == 0 {
            return Err(format!("bad option {s:?}"));
        }
        Ok(ChargingOption { dir: i - 1, anchor })
    }
}

/// Whether `p` sees `q` with respect to `opt`.
pub fn sees(p: &Polygon, q: &Polygon, opt: ChargingOption) -> bool {
    let ds = p.ds();
    let i = opt.dir;
    if p.is_degenerate(i) {
        return false;
    }
    let j = ds.opposite(i);
    let (a, b) = (p.tail(i), p.head(i));
    let (target, own) = match opt.anchor {
        Anchor::Tail => (q.head(j), a),
        Anchor::Head => (q.tail(j), b),
    };
    target == own || in_segment_interior(a, b, target)
}

/// `seen[p]` lists the polygons `p` sees (sorted); `seer[q]` is the polygon
/// seeing `q`, and `collisions` lists polygons with more than one seer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeeingRelation {
    pub seen: Vec<Vec<usize>>,
    pub seer: Vec<Option<usize>>,
    pub collisions: Vec<usize>,
}

pub fn seeing_relation(polys: &[Polygon], opt: ChargingOption) -> SeeingRelation {
    let n = polys.len();
    let mut rel = SeeingRelation { seen: vec![Vec::new(); n], seer: vec![None; n], collisions: Vec::new() };
    for p in 0..n {
        for q in 0..n {
            if p != q && sees(&polys[p], &polys[q], opt) {
                rel.seen[p].push(q);
                if rel.seer[q].is_some() {
                    rel.collisions.push(q);
                } else {
                    rel.seer[q] = Some(p);
                }
            }
        }
    }
    rel.collisions.sort_unstable();
    rel.collisions.dedup();
    rel
}

/// Each polygon is seen by at most one other polygon.
pub fn check_injectivity(polys: &[Polygon], opt: ChargingOption) -> bool {
    seeing_relation(polys, opt).collisions.is_empty()
}

/// Polygons all of whose edges but at most one lie on the box boundary
/// (degenerate edges count as lying on it).
pub fn corner_polygons(inst: &Instance) -> Vec<usize> {
    let m = inst.ds.len();
    inst.polygons
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let free = (0..m).filter(|&k| !p.is_degenerate(k) && p.support(k) != inst.bbox.support(k)).count();
            free <= 1
        })
        .map(|(id, _)| id)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptionCount {
    pub option: ChargingOption,
    pub accountable: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargingReport {
    pub corners: Vec<usize>,
    pub per_option: Vec<OptionCount>,
    pub chosen: ChargingOption,
    pub accountable: Vec<usize>,
    /// `ceil(3 |OPT \ Z| / 4d)`.
    pub bound: usize,
}

/// Accountable polygons outside `z` for one option.
pub fn accountable(polys: &[Polygon], z: &[usize], opt: ChargingOption) -> Vec<usize> {
    let rel = seeing_relation(polys, opt);
    (0..polys.len()).filter(|p| !z.contains(p) && !rel.seen[*p].is_empty()).collect()
}

/// Picks the option with the most accountable polygons (smallest option on
/// ties) and checks it against the guaranteed bound.
pub fn best_option(inst: &Instance, z: &[usize]) -> Result<ChargingReport> {
    let d = inst.d();
    let per_option: Vec<OptionCount> = ChargingOption::all(&inst.ds)
        .into_iter()
        .map(|option| OptionCount { option, accountable: accountable(&inst.polygons, z, option) })
        .collect();
    let best = per_option
        .iter()
        .max_by(|a, b| a.accountable.len().cmp(&b.accountable.len()).then(b.option.cmp(&a.option)))
        .expect("at least one option");
    let rest = inst.len() - z.len();
    let bound = (3 * rest).div_ceil(4 * d);
    if best.accountable.len() < bound {
        return Err(Error::BoundViolated);
    }
    Ok(ChargingReport {
        corners: z.to_vec(),
        chosen: best.option,
        accountable: best.accountable.clone(),
        per_option,
        bound,
    })
}

/// Integer linear map applied to every vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transform {
    pub m: [[i64; 2]; 2],
}

impl Transform {
    pub const IDENTITY: Transform = Transform { m: [[1, 0], [0, 1]] };

    pub fn apply_vec(&self, v: Vector) -> Vector {
        Vector::new(self.m[0][0] * v.x + self.m[0][1] * v.y, self.m[1][0] * v.x + self.m[1][1] * v.y)
    }

    pub fn apply(&self, p: &Point) -> Point {
        use num_bigint::BigInt;
        let c = |k: i64| BigInt::from(k);
        Point::new(&p.x * c(self.m[0][0]) + &p.y * c(self.m[0][1]), &p.x * c(self.m[1][0]) + &p.y * c(self.m[1][1]))
    }

    pub fn then(&self, next: &Transform) -> Transform {
        let a = &next.m;
        let b = &self.m;
        let mut m = [[0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Transform { m }
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Inverse of a unimodular map.
    pub fn inverse(&self) -> Transform {
        let d = self.det();
        assert!(d == 1 || d == -1, "not unimodular");
        let m = &self.m;
        Transform { m: [[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]] }
    }
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub instance: Instance,
    pub transform: Transform,
    pub option: ChargingOption,
}

/// Maps the instance so that `opt` becomes `(v_1, t)`: a unimodular map
/// sends `v_i` to the vertical-up direction, followed by the reflection
/// `y -> -y` for head options.
pub fn normalize_to_v1t(inst: &Instance, opt: ChargingOption) -> Result<Normalized> {
    let ds = &inst.ds;
    let v = ds.dir(opt.dir);
    let (a, b) = (v.x, v.y);
    let ext = a.extended_gcd(&b);
    let g = ext.gcd;
    let (x, y) = if g < 0 { (-ext.x, -ext.y) } else { (ext.x, ext.y) };
    let g = g.abs();
    let mut t = Transform { m: [[b / g, -a / g], [x, y]] };
    debug_assert_eq!(t.det(), 1);
    if opt.anchor == Anchor::Head {
        t = t.then(&Transform { m: [[1, 0], [0, -1]] });
    }
    let instance = transform_instance(inst, &t, opt.dir)?;
    Ok(Normalized { instance, transform: t, option: opt })
}

/// Applies `t` and rebuilds the direction system; the image of `v_k` must be
/// vertical and becomes `v_1 = (0, 1)` up to orientation.
pub fn transform_instance(inst: &Instance, t: &Transform, k: usize) -> Result<Instance> {
    let ds = &inst.ds;
    let img: Vec<Vector> = (0..ds.len()).map(|i| t.apply_vec(ds.dir(i))).collect();
    debug_assert!(img[k].x == 0);
    let mut left: Vec<Vector> = img.iter().copied().filter(|w| w.x < 0).collect();
    left.sort_by(|p, q| 0.cmp(&p.cross(*q)));
    let mut base = vec![Vector::new(0, 1)];
    base.extend(left);
    let nds = Arc::new(DirectionSystem::new(&base)?);
    let map = |p: &Polygon| -> Result<Polygon> {
        let pts: Vec<Point> = p.vertices().iter().map(|q| t.apply(q)).collect();
        Ok(Polygon::hull_of(nds.clone(), &pts)?)
    };
    let polygons = inst.polygons.iter().map(map).collect::<Result<Vec<_>>>()?;
    let bbox = map(&inst.bbox)?;
    Ok(Instance { ds: nds, polygons, bbox })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse;

    fn stacked() -> Instance {
        parse("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 3\npoly 1 1 0 0\npoly 2 3 -1 -1\npoly 2 1 -1 0\n").unwrap()
    }

    #[test]
    fn option_text() {
        let o: ChargingOption = "v3h".parse().unwrap();
        assert_eq!(o, ChargingOption { dir: 2, anchor: Anchor::Head });
        assert_eq!(o.to_string(), "v3h");
        assert!("v0t".parse::<ChargingOption>().is_err());
        assert_eq!(ChargingOption::all(&DirectionSystem::axis()).len(), 8);
    }

    #[test]
    fn seeing_between_squares() {
        let inst = stacked();
        let p = &inst.polygons;
        // [0,1]^2 and [1,2]x[0,1]: the bottom-left corner of the right square
        // is the tail of the right edge of the left square.
        assert!(sees(&p[0], &p[2], ChargingOption::V1_TAIL));
        assert!(!sees(&p[0], &p[1], ChargingOption::V1_TAIL));
        assert!(!sees(&p[0], &p[1], ChargingOption { dir: 0, anchor: Anchor::Head }));
        assert!(check_injectivity(p, ChargingOption::V1_TAIL));
        let low = parse("dops 1\nd 2\ndir 0 1\ndir -1 0\nn 2\npoly 1 1 0 0\npoly 2 1/2 -1 1\n").unwrap();
        let q = &low.polygons;
        assert!(!sees(&q[0], &q[1], ChargingOption::V1_TAIL));
        assert!(sees(&q[0], &q[1], ChargingOption { dir: 0, anchor: Anchor::Head }));
        // The right square sees the left one through its left edge.
        assert!(sees(&q[1], &q[0], ChargingOption { dir: 2, anchor: Anchor::Head }));
    }

    #[test]
    fn normalization_preserves_seeing() {
        let inst = stacked();
        for opt in ChargingOption::all(&inst.ds) {
            let norm = normalize_to_v1t(&inst, opt).unwrap();
            let before = seeing_relation(&inst.polygons, opt);
            let after = seeing_relation(&norm.instance.polygons, ChargingOption::V1_TAIL);
            assert_eq!(before.seen, after.seen, "{opt}");
        }
    }
}
