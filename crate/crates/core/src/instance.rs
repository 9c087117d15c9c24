//! Instances, the `.dop` text format, random generation and the conflict
//! graph.
//!
//! ```text
//! dops 1
//! d 2
//! dir 0 1
//! dir -1 0
//! n 1
//! poly 1 1 0 0
//! bbox 2 2 1 1
//! ```
//!
//! `poly` lines list the support values `p_1 … p_2d`. The optional `bbox`
//! line gives either the four supports of a parallelogram in directions
//! `v_1, v_2, v_{d+1}, v_{d+2}` or all `2d` supports.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{format_rational, parse_rational, rat, DirectionSystem, Point, Polygon, Rational, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub ds: Arc<DirectionSystem>,
    /// Polygon ids are positions in this list.
    pub polygons: Vec<Polygon>,
    pub bbox: Polygon,
}

impl Instance {
    /// Builds an instance with the default bounding box.
    pub fn new(ds: Arc<DirectionSystem>, polygons: Vec<Polygon>) -> Result<Self> {
        let bbox = default_bbox(&ds, &polygons)?;
        Ok(Instance { ds, polygons, bbox })
    }

    pub fn with_bbox(ds: Arc<DirectionSystem>, polygons: Vec<Polygon>, bbox: Polygon) -> Result<Self> {
        let inst = Instance { ds, polygons, bbox };
        inst.check_inside()?;
        Ok(inst)
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn d(&self) -> usize {
        self.ds.d()
    }

    /// Every polygon closure must lie in the bounding box closure.
    pub fn check_inside(&self) -> Result<()> {
        for (id, p) in self.polygons.iter().enumerate() {
            if !p.within(&self.bbox) {
                return Err(Error::OutsideBox(id));
            }
        }
        Ok(())
    }

    pub fn check_independent(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.polygons[i].intersects(&self.polygons[j])? {
                    return Err(Error::NotIndependent(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn subset(&self, ids: &[usize]) -> Instance {
        Instance {
            ds: self.ds.clone(),
            polygons: ids.iter().map(|&i| self.polygons[i].clone()).collect(),
            bbox: self.bbox.clone(),
        }
    }
}

/// Parallelogram bounded by the extreme vertical lines and the extreme
/// `v_2` lines, pushed outwards by one unit so every polygon is strictly
/// inside.
pub fn default_bbox(ds: &Arc<DirectionSystem>, polygons: &[Polygon]) -> Result<Polygon> {
    let d = ds.d();
    let mut corners4 = [rat(1), rat(1), rat(1), rat(1)];
    for (slot, k) in [0, 1, d, d + 1].into_iter().enumerate() {
        let m = polygons.iter().map(|p| p.support(k).clone()).max().unwrap_or_else(|| rat(0));
        corners4[slot] = m + rat(1);
    }
    parallelogram(ds, &corners4)
}

/// Polygon of the system whose only non-degenerate edges lie in directions
/// `v_1, v_2, v_{d+1}, v_{d+2}` with the given supports.
pub fn parallelogram(ds: &Arc<DirectionSystem>, s: &[Rational; 4]) -> Result<Polygon> {
    let d = ds.d();
    let idx = [0, 1, d, d + 1];
    let mut pts = Vec::with_capacity(4);
    for k in 0..4 {
        let (i, j) = (idx[k], idx[(k + 1) % 4]);
        let p = crate::geom::line_intersection(ds.normal(i), &s[k], ds.normal(j), &s[(k + 1) % 4])
            .expect("v_1 and v_2 are independent");
        pts.push(p);
    }
    Ok(Polygon::hull_of(ds.clone(), &pts)?)
}

/// Four supports if `p` is such a parallelogram.
fn as_parallelogram(ds: &Arc<DirectionSystem>, p: &Polygon) -> Option<[Rational; 4]> {
    let d = ds.d();
    let s = [p.support(0).clone(), p.support(1).clone(), p.support(d).clone(), p.support(d + 1).clone()];
    let q = parallelogram(ds, &s).ok()?;
    (&q == p).then_some(s)
}

pub fn serialize(inst: &Instance) -> String {
    let mut out = String::new();
    let ds = &inst.ds;
    writeln!(out, "dops 1").unwrap();
    writeln!(out, "d {}", ds.d()).unwrap();
    for v in ds.base() {
        writeln!(out, "dir {} {}", v.x, v.y).unwrap();
    }
    writeln!(out, "n {}", inst.len()).unwrap();
    let join = |xs: &[Rational]| xs.iter().map(format_rational).collect::<Vec<_>>().join(" ");
    for p in &inst.polygons {
        writeln!(out, "poly {}", join(p.supports())).unwrap();
    }
    match as_parallelogram(ds, &inst.bbox) {
        Some(s) => writeln!(out, "bbox {}", join(&s)).unwrap(),
        None => writeln!(out, "bbox {}", join(inst.bbox.supports())).unwrap(),
    }
    out
}

pub fn parse(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
        match lines.next() {
            Some((k, l)) => Ok((k, l.split_whitespace().collect())),
            None => Err(Error::Parse { line: 0, msg: format!("unexpected end of input, expected {what}") }),
        }
    };
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let int = |line: usize, s: &str| -> Result<i64> {
        s.parse::<i64>().map_err(|_| perr(line, format!("bad integer {s:?}")))
    };
    let ratv = |line: usize, s: &str| -> Result<Rational> {
        parse_rational(s).ok_or_else(|| perr(line, format!("bad rational {s:?}")))
    };

    let (k, t) = next("header")?;
    if t != ["dops", "1"] {
        return Err(perr(k, "expected `dops 1`".into()));
    }
    let (k, t) = next("d")?;
    if t.len() != 2 || t[0] != "d" {
        return Err(perr(k, "expected `d <d>`".into()));
    }
    let d = int(k, t[1])?;
    if !(2..=64).contains(&d) {
        return Err(perr(k, format!("d = {d} out of range")));
    }
    let mut base = Vec::new();
    for _ in 0..d {
        let (k, t) = next("dir")?;
        if t.len() != 3 || t[0] != "dir" {
            return Err(perr(k, "expected `dir <x> <y>`".into()));
        }
        base.push(Vector::new(int(k, t[1])?, int(k, t[2])?));
    }
    let ds = Arc::new(DirectionSystem::new(&base)?);
    let (k, t) = next("n")?;
    if t.len() != 2 || t[0] != "n" {
        return Err(perr(k, "expected `n <n>`".into()));
    }
    let n = int(k, t[1])?;
    if n < 0 {
        return Err(perr(k, "negative n".into()));
    }
    let m = ds.len();
    let mut polygons = Vec::with_capacity(n as usize);
    for id in 0..n as usize {
        let (k, t) = next("poly")?;
        if t.len() != m + 1 || t[0] != "poly" {
            return Err(perr(k, format!("expected `poly` with {m} supports")));
        }
        let s = t[1..].iter().map(|x| ratv(k, x)).collect::<Result<Vec<_>>>()?;
        let p = Polygon::new(ds.clone(), s).map_err(|source| Error::Polygon { id, source })?;
        polygons.push(p);
    }
    let bbox = match lines.next() {
        None => default_bbox(&ds, &polygons)?,
        Some((k, l)) => {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t[0] != "bbox" {
                return Err(perr(k, format!("unexpected {:?}", t[0])));
            }
            let s = t[1..].iter().map(|x| ratv(k, x)).collect::<Result<Vec<_>>>()?;
            let b = if s.len() == 4 {
                parallelogram(&ds, &[s[0].clone(), s[1].clone(), s[2].clone(), s[3].clone()])
            } else if s.len() == m {
                Polygon::new(ds.clone(), s).map_err(Error::from)
            } else {
                return Err(perr(k, format!("bbox needs 4 or {m} supports")));
            };
            let b = b.map_err(|e| perr(k, format!("bbox: {e}")))?;
            if let Some((k, _)) = lines.next() {
                return Err(perr(k, "trailing content".into()));
            }
            b
        }
    };
    Instance::with_bbox(ds, polygons, bbox)
}

/// Fixed direction systems used by the generator.
pub fn default_directions(d: usize) -> Result<DirectionSystem> {
    let left: &[(i64, i64)] = match d {
        2 => &[(-1, 0)],
        3 => &[(-1, 1), (-1, -1)],
        4 => &[(-1, 1), (-1, 0), (-1, -1)],
        5 => &[(-1, 2), (-1, 1), (-1, -1), (-1, -2)],
        6 => &[(-1, 2), (-1, 1), (-1, 0), (-1, -1), (-1, -2)],
        7 => &[(-1, 3), (-1, 2), (-1, 1), (-1, -1), (-1, -2), (-1, -3)],
        8 => &[(-1, 3), (-1, 2), (-1, 1), (-1, 0), (-1, -1), (-1, -2), (-1, -3)],
        _ => return Err(crate::GeomError::InvalidDirections(format!("no default system for d = {d}")).into()),
    };
    let mut base = vec![Vector::new(0, 1)];
    base.extend(left.iter().map(|&(x, y)| Vector::new(x, y)));
    Ok(DirectionSystem::new(&base)?)
}

#[derive(Clone, Debug)]
pub struct GenParams {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    /// Polygon centers are drawn from `[0, coord_range]^2`.
    pub coord_range: i64,
    /// Largest distance of a support line from the center.
    pub max_radius: i64,
    pub independent: bool,
    pub max_attempts: usize,
}

impl GenParams {
    pub fn new(d: usize, n: usize, seed: u64) -> Self {
        GenParams { d, n, seed, coord_range: 20, max_radius: 4, independent: true, max_attempts: 10_000 }
    }
}

pub fn generate(params: &GenParams) -> Result<Instance> {
    let ds = Arc::new(default_directions(params.d)?);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut polygons: Vec<Polygon> = Vec::with_capacity(params.n);
    let mut attempts = 0;
    while polygons.len() < params.n {
        attempts += 1;
        if attempts > params.max_attempts {
            return Err(Error::GenerationFailed(params.max_attempts));
        }
        let c = Point::from_ints(rng.gen_range(0..=params.coord_range), rng.gen_range(0..=params.coord_range));
        let supports: Vec<Rational> =
            (0..ds.len()).map(|k| c.dot(ds.normal(k)) + rat(rng.gen_range(1..=params.max_radius))).collect();
        let p = Polygon::new(ds.clone(), supports)?;
        if params.independent {
            let clash = polygons.iter().any(|q| q.intersects(&p).unwrap_or(true));
            if clash {
                continue;
            }
        }
        polygons.push(p);
    }
    Instance::new(ds, polygons)
}

/// Adjacency lists of the intersection graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    pub adj: Vec<Vec<usize>>,
}

impl ConflictGraph {
    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Adjacency as bit masks (for at most 64 vertices).
    pub fn masks(&self) -> Vec<u64> {
        self.adj.iter().map(|row| row.iter().fold(0u64, |m, &j| m | (1 << j))).collect()
    }
}

pub fn conflict_graph(inst: &Instance) -> ConflictGraph {
    let n = inst.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if inst.polygons[i].intersects(&inst.polygons[j]).expect("same system") {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    ConflictGraph { adj }
}
