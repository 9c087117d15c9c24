//! Recursive partitions: corner peeling, the step-by-step builder with its
//! protection and charging rules, certificates and their verifier.

pub mod cert;
pub mod check;
pub mod step;
pub mod verify;

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::charging::{accountable, best_option, corner_polygons, normalize_to_v1t, ChargingOption, Transform};
use crate::containers::{opt_in_cycle, Container, FenceCatalog};
use crate::geom::{clip, orient, Chain, HalfPlane, Point, Segment};
use crate::{Error, Instance, Result};

pub use cert::{parse_certificate, parse_certificate_raw, write_certificate};
pub use check::{check_step, StepInput, StepOutcome, StepViolation};
pub use step::{partition_step, PartitionStep, StepContext};
pub use verify::{verify_partition, Failure, VerificationReport, VerifyParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseTag {
    A1,
    A2,
    A3,
    A4,
    A5,
    B1,
    B2,
    C1,
    C2,
    C3,
    K2special,
    /// Peeling of a corner polygon.
    Z,
}

const TAGS: [(CaseTag, &str); 12] = [
    (CaseTag::A1, "A1"),
    (CaseTag::A2, "A2"),
    (CaseTag::A3, "A3"),
    (CaseTag::A4, "A4"),
    (CaseTag::A5, "A5"),
    (CaseTag::B1, "B1"),
    (CaseTag::B2, "B2"),
    (CaseTag::C1, "C1"),
    (CaseTag::C2, "C2"),
    (CaseTag::C3, "C3"),
    (CaseTag::K2special, "K2special"),
    (CaseTag::Z, "Z"),
];

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = TAGS.iter().find(|(t, _)| t == self).map(|(_, s)| *s).unwrap_or("?");
        f.write_str(name)
    }
}

impl FromStr for CaseTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        TAGS.iter().find(|(_, n)| *n == s).map(|(t, _)| *t).ok_or_else(|| format!("unknown case tag {s}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub case: CaseTag,
    pub gamma: Chain,
    pub ell: Segment,
    pub lost: Vec<usize>,
    pub charges: Vec<(usize, usize)>,
    pub children: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub container: Container,
    pub protected: Vec<usize>,
    pub step: Option<StepRecord>,
    /// Polygon kept at a leaf.
    pub leaf: Option<usize>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.step.is_none()
    }
}

/// Cardinalities behind the bound `|R| >= |Z| + ceil(|P|/2)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundSummary {
    pub r: usize,
    pub z: usize,
    /// Accountable polygons outside `Z`.
    pub p: usize,
    pub opt: usize,
    pub kept_accountable: usize,
    pub charged: usize,
    pub d: usize,
}

impl BoundSummary {
    /// `|R \ Z| >= max(kept accountable, charged)`.
    pub fn ledger_ok(&self) -> bool {
        self.r - self.z.min(self.r) >= self.kept_accountable.max(self.charged)
    }

    pub fn half_ok(&self) -> bool {
        self.r >= self.z + self.p.div_ceil(2)
    }

    /// `|R| >= ceil(3 |OPT| / 8d)`.
    pub fn ratio_ok(&self, opt: usize) -> bool {
        8 * self.d * self.r >= 3 * opt
    }
}

impl fmt::Display for BoundSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R={} Z={} P={} OPT={} kept_accountable={} charged={} need={}",
            self.r,
            self.z,
            self.p,
            self.opt,
            self.kept_accountable,
            self.charged,
            self.z + self.p.div_ceil(2)
        )
    }
}

#[derive(Clone, Debug)]
pub struct RecursivePartition {
    pub option: ChargingOption,
    /// Map from the original frame into the frame of `nodes`.
    pub transform: Transform,
    /// The instance in the frame of `nodes`.
    pub instance: Instance,
    pub nodes: Vec<Node>,
    pub z: Vec<usize>,
    pub accountable: Vec<usize>,
    /// Kept set `R`, sorted.
    pub kept: Vec<usize>,
}

impl RecursivePartition {
    pub fn summary(&self) -> BoundSummary {
        let charged = self.nodes.iter().filter_map(|n| n.step.as_ref()).map(|s| s.charges.len()).sum();
        BoundSummary {
            r: self.kept.len(),
            z: self.z.len(),
            p: self.accountable.len(),
            opt: self.instance.len(),
            kept_accountable: self.kept.iter().filter(|p| self.accountable.contains(p)).count(),
            charged,
            d: self.instance.d(),
        }
    }

    pub fn depth(&self, id: usize) -> usize {
        let mut k = 0;
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            k += 1;
            cur = self.nodes[p].parent;
        }
        k
    }
}

/// One corner polygon split off the working box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peel {
    pub polygon: usize,
    /// Box before the split, counterclockwise.
    pub before: Vec<Point>,
    /// Box after the split.
    pub after: Vec<Point>,
    /// The common boundary of the polygon and the remaining box.
    pub cut: Segment,
}

fn drop_collinear(mut pts: Vec<Point>) -> Vec<Point> {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let Some(k) = (0..n).find(|&k| orient(&pts[(k + n - 1) % n], &pts[k], &pts[(k + 1) % n]) == Ordering::Equal)
        else {
            return pts;
        };
        pts.remove(k);
    }
}

/// Splits the corner polygons `z` off the box one by one, in the given
/// order. A corner polygon without a free edge is the whole box and ends
/// the sequence.
pub fn peel_corner_polygons(inst: &Instance, z: &[usize]) -> Vec<Peel> {
    let ds = &inst.ds;
    let mut cur = drop_collinear(inst.bbox.vertices());
    let mut out = Vec::new();
    for &pid in z {
        let p = &inst.polygons[pid];
        let Some(k) = (0..ds.len()).find(|&k| !p.is_degenerate(k) && p.support(k) != inst.bbox.support(k)) else {
            break;
        };
        let n = ds.normal(k);
        let after = drop_collinear(clip(&cur, &HalfPlane::new(n.neg(), -p.support(k).clone())));
        let on: Vec<Point> = after.iter().filter(|q| q.dot(n) == *p.support(k)).cloned().collect();
        if after.len() < 3 || on.len() != 2 {
            break;
        }
        let cut = Segment::new(on[0].clone(), on[1].clone());
        out.push(Peel { polygon: pid, before: cur.clone(), after: after.clone(), cut });
        cur = after;
    }
    out
}

/// Upper and lower chains of a convex counterclockwise cycle: the upper
/// one runs right to left, the lower one left to right.
pub fn convex_chains(cycle: &[Point]) -> (Chain, Chain) {
    let n = cycle.len();
    let key_tr = |p: &Point| (p.x.clone(), p.y.clone());
    let tr = (0..n).max_by_key(|&k| key_tr(&cycle[k])).expect("non-empty");
    let tl = (0..n).min_by_key(|&k| (cycle[k].x.clone(), -cycle[k].y.clone())).expect("non-empty");
    let bl = (0..n).min_by_key(|&k| key_tr(&cycle[k])).expect("non-empty");
    let br = (0..n).max_by_key(|&k| (cycle[k].x.clone(), -cycle[k].y.clone())).expect("non-empty");
    let walk = |from: usize, to: usize| {
        let mut pts = vec![cycle[from].clone()];
        let mut k = from;
        while k != to {
            k = (k + 1) % n;
            pts.push(cycle[k].clone());
        }
        Chain::new(pts)
    };
    (walk(tr, tl), walk(bl, br))
}

/// Synthetic fence carriers: the chains of every box met while peeling.
pub fn peel_carriers(inst: &Instance, peels: &[Peel]) -> Vec<Chain> {
    let mut boxes = vec![drop_collinear(inst.bbox.vertices())];
    boxes.extend(peels.iter().map(|p| p.after.clone()));
    let mut out = Vec::new();
    for b in &boxes {
        let (top, bot) = convex_chains(b);
        out.push(top);
        out.push(bot);
    }
    out
}

#[derive(Clone, Debug)]
pub struct BuildParams {
    /// Sampling resolution of the tiling check on every step (0 disables).
    pub sample_res: u32,
    /// Candidates fully checked per step before giving up.
    pub max_attempts: usize,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams { sample_res: 8, max_attempts: 400 }
    }
}

/// Builds a recursive partition of an independent (typically maximally
/// extended) instance. The kept set satisfies `|R| >= |Z| + ceil(|P|/2)`.
pub fn build_recursive_partition(inst: &Instance, params: &BuildParams) -> Result<RecursivePartition> {
    inst.check_independent()?;
    let z0 = corner_polygons(inst);
    let report = best_option(inst, &z0)?;
    let norm = normalize_to_v1t(inst, report.chosen)?;
    let ni = norm.instance;
    let z = corner_polygons(&ni);
    let acc = accountable(&ni.polygons, &z, ChargingOption::V1_TAIL);
    let peels = peel_corner_polygons(&ni, &z);
    let catalog = FenceCatalog::new(&ni.polygons, &peel_carriers(&ni, &peels));
    let polys = &ni.polygons;
    let structured = |cycle: &[Point]| {
        Container::from_convex(cycle, &catalog).map_err(|e| Error::Partition(format!("peeled box: {e}")))
    };

    let mut nodes: Vec<Node> = Vec::new();
    let root_cycle = drop_collinear(ni.bbox.vertices());
    nodes.push(Node {
        id: 0,
        parent: None,
        container: structured(&root_cycle)?,
        protected: vec![],
        step: None,
        leaf: None,
    });
    let mut cur = 0;
    for peel in &peels {
        let p = &polys[peel.polygon];
        let a = nodes.len();
        nodes.push(Node {
            id: a,
            parent: Some(cur),
            container: structured(&p.vertices())?,
            protected: vec![],
            step: None,
            leaf: Some(peel.polygon),
        });
        nodes.push(Node {
            id: a + 1,
            parent: Some(cur),
            container: structured(&peel.after)?,
            protected: vec![],
            step: None,
            leaf: None,
        });
        nodes[cur].step = Some(StepRecord {
            case: CaseTag::Z,
            gamma: Chain::new(vec![peel.cut.tail.clone(), peel.cut.head.clone()]),
            ell: Segment::new(peel.cut.tail.clone(), peel.cut.tail.clone()),
            lost: vec![],
            charges: vec![],
            children: [a, a + 1],
        });
        cur = a + 1;
    }

    let mut is_acc = vec![false; polys.len()];
    for &p in &acc {
        is_acc[p] = true;
    }
    let ctx = StepContext {
        catalog: &catalog,
        accountable: &is_acc,
        sample_res: params.sample_res,
        max_attempts: params.max_attempts,
    };
    let mut charged: BTreeSet<usize> = BTreeSet::new();
    let mut queue = VecDeque::from([cur]);
    while let Some(id) = queue.pop_front() {
        let opt = opt_in_cycle(&nodes[id].container.cycle(), polys);
        if opt.len() <= 1 {
            nodes[id].leaf = opt.first().copied();
            continue;
        }
        let avoid: Vec<usize> = opt
            .iter()
            .copied()
            .filter(|&p| is_acc[p] && !nodes[id].protected.contains(&p))
            .filter(|&p| !catalog.seeing.seen[p].iter().any(|q| opt.contains(q)))
            .collect();
        let step = partition_step(&nodes[id].container, &nodes[id].protected, &avoid, &ctx)?;
        for &p in &nodes[id].protected {
            if step.lost.contains(&p) {
                return Err(Error::LostProtected(p));
            }
        }
        for &(_, t) in &step.charges {
            if !charged.insert(t) {
                return Err(Error::ChargeCollision(t));
            }
        }
        let a = nodes.len();
        let PartitionStep { case, gamma, ell, children, protected, lost, charges, .. } = step;
        for (k, (c, prot)) in children.into_iter().zip(protected).enumerate() {
            nodes.push(Node { id: a + k, parent: Some(id), container: c, protected: prot, step: None, leaf: None });
            queue.push_back(a + k);
        }
        nodes[id].step = Some(StepRecord { case, gamma, ell, lost, charges, children: [a, a + 1] });
    }
    let mut kept: Vec<usize> = nodes.iter().filter(|n| n.is_leaf()).filter_map(|n| n.leaf).collect();
    kept.sort_unstable();
    Ok(RecursivePartition {
        option: report.chosen,
        transform: norm.transform,
        instance: ni,
        nodes,
        z,
        accountable: acc,
        kept,
    })
}
