//! Brute-force reference implementations for tests. None of them calls the
//! code it is used to check.

use std::collections::{BTreeSet, HashMap};

use crate::geom::{Point, Polygon, Rational};
use crate::{Error, Instance, Result};

/// Whether the interiors of `p` and `q` meet: no edge normal separates the
/// two vertex sets.
pub fn intersect_oracle(p: &Polygon, q: &Polygon) -> bool {
    let ds = p.ds();
    let (vp, vq) = (p.vertices(), q.vertices());
    for k in 0..ds.len() {
        let n = ds.normal(k);
        let max_p = vp.iter().map(|v| v.dot(n)).max().unwrap();
        let min_q = vq.iter().map(|v| v.dot(n)).min().unwrap();
        if max_p <= min_q {
            return false;
        }
    }
    true
}

pub const ENUMERATE_CAP: usize = 16;

/// Size of a maximum independent set by scanning all subsets.
pub fn mis_enumerate(inst: &Instance) -> Result<usize> {
    let n = inst.len();
    if n > ENUMERATE_CAP {
        return Err(Error::TooLarge { n, cap: ENUMERATE_CAP });
    }
    let mut clash = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && intersect_oracle(&inst.polygons[i], &inst.polygons[j]) {
                clash[i] |= 1 << j;
            }
        }
    }
    let mut best = 0;
    for s in 0u32..(1 << n) {
        if (0..n).all(|i| s & (1 << i) == 0 || clash[i] & s == 0) {
            best = best.max(s.count_ones() as usize);
        }
    }
    Ok(best)
}

pub const GUILLOTINE_CAP: usize = 12;

/// Best number of polygons separable by recursive axis-parallel cuts of
/// the bounding box along lines through polygon and box vertices. Only
/// for the axis-parallel system.
pub fn guillotine_opt(inst: &Instance) -> Result<usize> {
    if inst.d() != 2 || inst.len() > GUILLOTINE_CAP {
        return Err(Error::TooLarge { n: inst.len(), cap: GUILLOTINE_CAP });
    }
    let mut xs: BTreeSet<Rational> = BTreeSet::new();
    let mut ys: BTreeSet<Rational> = BTreeSet::new();
    let mut boxes = Vec::new();
    for p in inst.polygons.iter().chain([&inst.bbox]) {
        let vs = p.vertices();
        for v in &vs {
            xs.insert(v.x.clone());
            ys.insert(v.y.clone());
        }
        let lo =
            Point::new(vs.iter().map(|v| &v.x).min().unwrap().clone(), vs.iter().map(|v| &v.y).min().unwrap().clone());
        let hi =
            Point::new(vs.iter().map(|v| &v.x).max().unwrap().clone(), vs.iter().map(|v| &v.y).max().unwrap().clone());
        boxes.push((lo, hi));
    }
    let frame = boxes.pop().unwrap();
    let xs: Vec<Rational> = xs.into_iter().filter(|x| *x >= frame.0.x && *x <= frame.1.x).collect();
    let ys: Vec<Rational> = ys.into_iter().filter(|y| *y >= frame.0.y && *y <= frame.1.y).collect();
    // Index boxes of the polygons on the coordinate grid.
    let ix = |v: &Rational, a: &[Rational]| a.iter().position(|w| w == v).unwrap();
    let cells: Vec<[usize; 4]> =
        boxes.iter().map(|(lo, hi)| [ix(&lo.x, &xs), ix(&hi.x, &xs), ix(&lo.y, &ys), ix(&hi.y, &ys)]).collect();
    let mut memo = HashMap::new();
    Ok(guillotine(&cells, [0, xs.len() - 1, 0, ys.len() - 1], &mut memo))
}

fn guillotine(cells: &[[usize; 4]], r: [usize; 4], memo: &mut HashMap<[usize; 4], usize>) -> usize {
    if let Some(&v) = memo.get(&r) {
        return v;
    }
    let [x0, x1, y0, y1] = r;
    let inside: Vec<&[usize; 4]> =
        cells.iter().filter(|c| c[0] >= x0 && c[1] <= x1 && c[2] >= y0 && c[3] <= y1).collect();
    let mut best = usize::from(!inside.is_empty());
    if inside.len() > 1 {
        for x in x0 + 1..x1 {
            best = best.max(guillotine(cells, [x0, x, y0, y1], memo) + guillotine(cells, [x, x1, y0, y1], memo));
        }
        for y in y0 + 1..y1 {
            best = best.max(guillotine(cells, [x0, x1, y0, y], memo) + guillotine(cells, [x0, x1, y, y1], memo));
        }
    }
    memo.insert(r, best);
    best
}

fn crossings(cycle: &[(f64, f64)], p: (f64, f64)) -> bool {
    let n = cycle.len();
    let mut inside = false;
    for k in 0..n {
        let (a, b) = (cycle[k], cycle[(k + 1) % n]);
        if (a.1 > p.1) != (b.1 > p.1) && p.0 < a.0 + (p.1 - a.1) * (b.0 - a.0) / (b.1 - a.1) {
            inside = !inside;
        }
    }
    inside
}

/// Dense even-odd sampling: every sample inside the parent lies in exactly
/// one child and every sample in a child lies in the parent. Samples are
/// offset so they avoid the (rational) boundaries of micro instances.
pub fn tiling_by_sampling(parent: &[Point], kids: [&[Point]; 2], res: usize) -> bool {
    let f = |c: &[Point]| -> Vec<(f64, f64)> { c.iter().map(|p| p.to_f64()).collect() };
    let (pc, k1, k2) = (f(parent), f(kids[0]), f(kids[1]));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pc.iter().chain(&k1).chain(&k2) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    for i in 0..res {
        for j in 0..res {
            let p =
                (x0 + (x1 - x0) * (i as f64 + 0.3137) / res as f64, y0 + (y1 - y0) * (j as f64 + 0.2749) / res as f64);
            let a = crossings(&pc, p);
            let n = crossings(&k1, p) as u8 + crossings(&k2, p) as u8;
            if (a && n != 1) || (!a && n != 0) {
                return false;
            }
        }
    }
    true
}
