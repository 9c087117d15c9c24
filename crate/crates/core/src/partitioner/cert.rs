//! Text certificates (`.rp`).
//!
//! ```text
//! misdop-partition 1
//! option v1t
//! nodes 3
//! node 0 parent -
//! container 2
//! cut L 0 4 0 0
//! fence 0 0 4 0
//! cut R 4 0 4 4
//! fence 4 4 0 4
//! protected
//! step C1
//! gamma 2 0 2 4
//! ell 2 0 2 4
//! lost
//! charges
//! children 1 2
//! end
//! ```
//!
//! Coordinates are exact rationals in the frame of the instance file; the
//! reader maps them back with the transform derived from the option.

use std::fmt::Write as _;

use crate::charging::{accountable, corner_polygons, normalize_to_v1t, ChargingOption};
use crate::containers::{Container, CuttingLine, Fence, FenceCatalog, FenceKind, FenceSource, Side};
use crate::geom::{format_rational, parse_rational, Chain, Point, Segment};
use crate::{Error, Instance, Result};

use super::{peel_carriers, peel_corner_polygons, CaseTag, Node, RecursivePartition, StepRecord};

fn pt(out: &mut String, p: &Point) {
    let _ = write!(out, " {} {}", format_rational(&p.x), format_rational(&p.y));
}

fn ids(out: &mut String, key: &str, v: &[usize]) {
    out.push_str(key);
    for i in v {
        let _ = write!(out, " {i}");
    }
    out.push('\n');
}

pub fn write_certificate(rp: &RecursivePartition) -> String {
    let back = rp.transform.inverse();
    let m = |p: &Point| back.apply(p);
    let mut out = String::new();
    let _ = writeln!(out, "misdop-partition 1");
    let _ = writeln!(out, "option {}", rp.option);
    let _ = writeln!(out, "nodes {}", rp.nodes.len());
    for n in &rp.nodes {
        match n.parent {
            Some(p) => {
                let _ = writeln!(out, "node {} parent {p}", n.id);
            }
            None => {
                let _ = writeln!(out, "node {} parent -", n.id);
            }
        }
        let _ = writeln!(out, "container {}", n.container.kappa());
        for (s, f) in n.container.cuts.iter().zip(&n.container.fences) {
            out.push_str("cut ");
            out.push_str(if s.side == Side::Left { "L" } else { "R" });
            pt(&mut out, &m(&s.seg.tail));
            pt(&mut out, &m(&s.seg.head));
            out.push_str("\nfence");
            for p in f.chain.points() {
                pt(&mut out, &m(p));
            }
            out.push('\n');
        }
        ids(&mut out, "protected", &n.protected);
        if let Some(s) = &n.step {
            let _ = writeln!(out, "step {}", s.case);
            out.push_str("gamma");
            for p in s.gamma.points() {
                pt(&mut out, &m(p));
            }
            out.push_str("\nell");
            pt(&mut out, &m(&s.ell.tail));
            pt(&mut out, &m(&s.ell.head));
            out.push('\n');
            ids(&mut out, "lost", &s.lost);
            out.push_str("charges");
            for (a, b) in &s.charges {
                let _ = write!(out, " {a}>{b}");
            }
            out.push('\n');
            let _ = writeln!(out, "children {} {}", s.children[0], s.children[1]);
        } else {
            match n.leaf {
                Some(p) => {
                    let _ = writeln!(out, "leaf {p}");
                }
                None => {
                    let _ = writeln!(out, "leaf -");
                }
            }
        }
        out.push_str("end\n");
    }
    out
}

struct Lines<'a> {
    it: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line: usize,
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        loop {
            let Some((k, l)) = self.it.next() else { return Err(bad(self.line + 1, "unexpected end of file")) };
            self.line = k + 1;
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            return Ok((k + 1, l.split_whitespace().collect()));
        }
    }

    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (k, w) = self.next()?;
        if w[0] != key {
            return Err(bad(k, format!("expected {key}, found {}", w[0])));
        }
        Ok((k, w[1..].to_vec()))
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| bad(line, format!("bad number {s:?}")))
}

fn points(line: usize, w: &[&str], map: &dyn Fn(Point) -> Point) -> Result<Vec<Point>> {
    if !w.len().is_multiple_of(2) || w.is_empty() {
        return Err(bad(line, "odd number of coordinates"));
    }
    w.chunks(2)
        .map(|c| {
            let x = parse_rational(c[0]).ok_or_else(|| bad(line, format!("bad rational {:?}", c[0])))?;
            let y = parse_rational(c[1]).ok_or_else(|| bad(line, format!("bad rational {:?}", c[1])))?;
            Ok(map(Point::new(x, y)))
        })
        .collect()
}

fn id_list(line: usize, w: &[&str]) -> Result<Vec<usize>> {
    w.iter().map(|s| num(line, s)).collect()
}

fn opt_id(line: usize, s: &str) -> Result<Option<usize>> {
    if s == "-" {
        Ok(None)
    } else {
        num(line, s).map(Some)
    }
}

fn placeholder(chain: Chain) -> Fence {
    Fence { chain, kind: FenceKind::Top, source: FenceSource::Synthetic }
}

/// Parses the charging option and the nodes, with coordinates as written
/// (the frame of the instance file) and unclassified fences.
pub fn parse_certificate_raw(text: &str) -> Result<(ChargingOption, Vec<Node>)> {
    let mut ls = Lines { it: text.lines().enumerate().peekable(), line: 0 };
    let (k, w) = ls.next()?;
    if w != ["misdop-partition", "1"] {
        return Err(bad(k, "not a partition certificate"));
    }
    let (k, w) = ls.expect("option")?;
    let option: ChargingOption =
        w.first().ok_or_else(|| bad(k, "missing option"))?.parse().map_err(|e: String| bad(k, e))?;
    let map = |p: Point| p;
    let (k, w) = ls.expect("nodes")?;
    let count: usize = num(k, w.first().ok_or_else(|| bad(k, "missing count"))?)?;
    let mut nodes = Vec::with_capacity(count.min(1 << 16));
    for expected in 0..count {
        let (k, w) = ls.expect("node")?;
        if w.len() != 3 || w[1] != "parent" {
            return Err(bad(k, "expected node <id> parent <id|->"));
        }
        let id: usize = num(k, w[0])?;
        if id != expected {
            return Err(bad(k, format!("node ids must be consecutive, expected {expected}")));
        }
        let parent = opt_id(k, w[2])?;
        let (k, w) = ls.expect("container")?;
        let kappa: usize = num(k, w.first().ok_or_else(|| bad(k, "missing kappa"))?)?;
        let mut container = Container { cuts: Vec::new(), fences: Vec::new() };
        for _ in 0..kappa {
            let (k, w) = ls.expect("cut")?;
            let side = match w.first() {
                Some(&"L") => Side::Left,
                Some(&"R") => Side::Right,
                _ => return Err(bad(k, "cut side must be L or R")),
            };
            let p = points(k, &w[1..], &map)?;
            if p.len() != 2 {
                return Err(bad(k, "a cut has two endpoints"));
            }
            container.cuts.push(CuttingLine { seg: Segment::new(p[0].clone(), p[1].clone()), side });
            let (k, w) = ls.expect("fence")?;
            container.fences.push(placeholder(Chain::new(points(k, &w, &map)?)));
        }
        let (k, w) = ls.expect("protected")?;
        let protected = id_list(k, &w)?;
        let (k, w) = ls.next()?;
        let mut node = Node { id, parent, container, protected, step: None, leaf: None };
        match w[0] {
            "step" => {
                let case: CaseTag =
                    w.get(1).ok_or_else(|| bad(k, "missing case"))?.parse().map_err(|e: String| bad(k, e))?;
                let (k, w) = ls.expect("gamma")?;
                let gamma = Chain::new(points(k, &w, &map)?);
                let (k, w) = ls.expect("ell")?;
                let e = points(k, &w, &map)?;
                if e.len() != 2 {
                    return Err(bad(k, "ell has two endpoints"));
                }
                let (k, w) = ls.expect("lost")?;
                let lost = id_list(k, &w)?;
                let (k, w) = ls.expect("charges")?;
                let charges = w
                    .iter()
                    .map(|s| {
                        let (a, b) = s.split_once('>').ok_or_else(|| bad(k, format!("bad charge {s:?}")))?;
                        Ok((num(k, a)?, num(k, b)?))
                    })
                    .collect::<Result<Vec<(usize, usize)>>>()?;
                let (k, w) = ls.expect("children")?;
                if w.len() != 2 {
                    return Err(bad(k, "expected two children"));
                }
                let children = [num(k, w[0])?, num(k, w[1])?];
                node.step = Some(StepRecord {
                    case,
                    gamma,
                    ell: Segment::new(e[0].clone(), e[1].clone()),
                    lost,
                    charges,
                    children,
                });
            }
            "leaf" => {
                node.leaf = opt_id(k, w.get(1).ok_or_else(|| bad(k, "missing leaf payload"))?)?;
            }
            other => return Err(bad(k, format!("expected step or leaf, found {other}"))),
        }
        ls.expect("end")?;
        nodes.push(node);
    }
    Ok((option, nodes))
}

/// Parses a certificate for `inst` (the instance it was built from, in its
/// own frame). Fences are classified against the instance's carriers; a
/// chain no carrier covers is kept and left for the verifier to reject.
pub fn parse_certificate(text: &str, inst: &Instance) -> Result<RecursivePartition> {
    let (option, raw) = parse_certificate_raw(text)?;
    if option.dir >= inst.ds.len() {
        return Err(Error::InvalidCertificate("option direction out of range".into()));
    }
    let norm = normalize_to_v1t(inst, option)?;
    let ni = norm.instance;
    let t = norm.transform;
    let z = corner_polygons(&ni);
    let catalog = FenceCatalog::new(&ni.polygons, &peel_carriers(&ni, &peel_corner_polygons(&ni, &z)));
    let n = ni.len();
    let mp = |p: &Point| t.apply(p);
    let ms = |s: &Segment| Segment::new(mp(&s.tail), mp(&s.head));
    let mc = |c: &Chain| Chain::new(c.points().iter().map(mp).collect());
    let mut nodes = Vec::with_capacity(raw.len());
    for node in raw {
        let mut ids: Vec<usize> = node.protected.clone();
        ids.extend(node.leaf);
        if let Some(s) = &node.step {
            ids.extend(s.lost.iter().copied());
            ids.extend(s.charges.iter().flat_map(|&(a, b)| [a, b]));
        }
        if let Some(i) = ids.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidCertificate(format!("node {}: polygon id {i} out of range", node.id)));
        }
        let container = Container {
            cuts: node.container.cuts.iter().map(|c| CuttingLine { seg: ms(&c.seg), side: c.side }).collect(),
            fences: node
                .container
                .fences
                .iter()
                .map(|f| {
                    let chain = mc(&f.chain);
                    catalog.fence(chain.clone()).unwrap_or_else(|| placeholder(chain))
                })
                .collect(),
        };
        let step = node.step.map(|s| StepRecord { gamma: mc(&s.gamma), ell: ms(&s.ell), ..s });
        nodes.push(Node { container, step, ..node });
    }
    let acc = accountable(&ni.polygons, &z, ChargingOption::V1_TAIL);
    let mut kept: Vec<usize> = nodes.iter().filter(|n| n.is_leaf()).filter_map(|n| n.leaf).collect();
    kept.sort_unstable();
    Ok(RecursivePartition { option, transform: t, instance: ni, nodes, z, accountable: acc, kept })
}
