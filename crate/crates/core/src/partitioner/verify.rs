//! Independent certificate verification. Nothing recorded in the
//! certificate is trusted: corner polygons, accountable polygons, fence
//! carriers, polygon placement and protection are all recomputed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::charging::{accountable, corner_polygons, normalize_to_v1t, ChargingOption};
use crate::containers::{check_structured, find_protection, opt_in_cycle, ContainerError, FenceCatalog};
use crate::Instance;

use super::check::{check_step, tiling_exact, StepInput};
use super::{peel_carriers, peel_corner_polygons, BoundSummary, CaseTag, RecursivePartition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub name: String,
    /// Node the failure was found at.
    pub node: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(n) => write!(f, "{} at node {}: {}", self.name, n, self.detail),
            None => write!(f, "{}: {}", self.name, self.detail),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    /// Number of individual checks run.
    pub checks: usize,
    pub failures: Vec<Failure>,
    pub summary: BoundSummary,
    pub steps: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn has(&self, name: &str) -> bool {
        self.failures.iter().any(|f| f.name == name)
    }

    fn check(&mut self, ok: bool, name: &str, node: Option<usize>, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(Failure { name: name.to_string(), node, detail: detail() });
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.failures {
            writeln!(f, "FAIL {x}")?;
        }
        writeln!(f, "{}", self.summary)?;
        write!(
            f,
            "{} checks, {} failures: {}",
            self.checks,
            self.failures.len(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Clone, Debug)]
pub struct VerifyParams {
    /// Sampling resolution of the tiling check (0 disables it).
    pub sample_res: u32,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { sample_res: 8 }
    }
}

fn container_failure(e: &ContainerError) -> &'static str {
    match e {
        ContainerError::TooManySegments(_) => "kappa",
        _ => "container",
    }
}

/// Re-checks a recursive partition of `inst` (given in its own frame).
pub fn verify_partition(rp: &RecursivePartition, inst: &Instance, params: &VerifyParams) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let norm = match normalize_to_v1t(inst, rp.option) {
        Ok(n) => n,
        Err(e) => {
            rep.check(false, "frame", None, || e.to_string());
            return rep;
        }
    };
    rep.check(norm.transform == rp.transform, "frame", None, || "transform does not match the option".into());
    let ni = &norm.instance;
    let polys = &ni.polygons;
    let n = polys.len();
    let z = corner_polygons(ni);
    let acc: BTreeSet<usize> = accountable(polys, &z, ChargingOption::V1_TAIL).into_iter().collect();
    let peels = peel_corner_polygons(ni, &z);
    let catalog = FenceCatalog::new(polys, &peel_carriers(ni, &peels));
    let nodes = &rp.nodes;
    let count = nodes.len();

    // Tree shape.
    rep.check(count > 0, "tree-structure", None, || "no nodes".into());
    if count == 0 {
        return rep;
    }
    let mut parent_of: Vec<Option<usize>> = vec![None; count];
    for (k, node) in nodes.iter().enumerate() {
        rep.check(node.id == k, "tree-structure", Some(k), || format!("node id {}", node.id));
        if let Some(s) = &node.step {
            for &c in &s.children {
                let ok = c < count && c != k && parent_of[c].is_none() && nodes[c].parent == Some(k);
                rep.check(ok, "tree-structure", Some(k), || format!("bad child {c}"));
                if c < count && parent_of[c].is_none() {
                    parent_of[c] = Some(k);
                }
            }
            rep.check(s.children[0] != s.children[1], "tree-structure", Some(k), || "children coincide".into());
        }
    }
    rep.check(nodes[0].parent.is_none(), "tree-structure", Some(0), || "root has a parent".into());
    for (k, node) in nodes.iter().enumerate().skip(1) {
        rep.check(node.parent.is_some() && parent_of[k] == node.parent, "tree-structure", Some(k), || {
            format!("parent {:?} does not list this node", node.parent)
        });
    }
    let mut reach = vec![false; count];
    let mut stack = vec![0];
    while let Some(k) = stack.pop() {
        if reach[k] {
            continue;
        }
        reach[k] = true;
        if let Some(s) = &nodes[k].step {
            stack.extend(s.children.iter().copied().filter(|&c| c < count));
        }
    }
    for (k, r) in reach.iter().enumerate() {
        rep.check(*r, "tree-structure", Some(k), || "unreachable".into());
    }
    if !rep.passed() {
        return rep;
    }

    let bbox = ni.bbox.vertices();
    let root = nodes[0].container.cycle();
    rep.check(tiling_exact(&bbox, [&root, &[]]).is_ok(), "root", Some(0), || "root is not the bounding box".into());

    let cycles: Vec<_> = nodes.iter().map(|nd| nd.container.cycle()).collect();
    let opts: Vec<Vec<usize>> = cycles.iter().map(|c| opt_in_cycle(c, polys)).collect();
    for (k, node) in nodes.iter().enumerate() {
        if let Err(e) = check_structured(&node.container, &catalog) {
            rep.check(false, container_failure(&e), Some(k), || e.to_string());
        }
        for &p in &node.protected {
            let ok = p < n && opts[k].contains(&p) && find_protection(p, &node.container, &catalog).is_some();
            rep.check(ok, "protected", Some(k), || format!("polygon {p} is not protected here"));
        }
    }

    let mut targets: BTreeMap<usize, usize> = BTreeMap::new();
    let mut charged_sources: BTreeSet<usize> = BTreeSet::new();
    let mut lost_all: BTreeSet<usize> = BTreeSet::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut peeled: Vec<usize> = Vec::new();
    for (k, node) in nodes.iter().enumerate() {
        let Some(s) = &node.step else {
            let here = &opts[k];
            rep.check(here.len() <= 1, "leaf", Some(k), || format!("leaf holds {} polygons", here.len()));
            rep.check(node.leaf == here.first().copied(), "leaf", Some(k), || {
                format!("payload {:?}, container holds {:?}", node.leaf, here)
            });
            kept.extend(here.first().copied());
            continue;
        };
        rep.steps += 1;
        let [c1, c2] = s.children;
        if s.case == CaseTag::Z {
            let child = &nodes[c1];
            let z_here = child.leaf.filter(|p| z.contains(p));
            let piece_ok = z_here.is_some_and(|p| {
                tiling_exact(&polys[p].vertices(), [&cycles[c1], &[]]).is_ok() && !peeled.contains(&p)
            });
            rep.check(piece_ok, "peel", Some(k), || "first child is not a corner polygon".into());
            peeled.extend(z_here);
            let tiles = tiling_exact(&cycles[k], [&cycles[c1], &cycles[c2]]);
            rep.check(tiles.is_ok(), "P1-tiling", Some(k), || tiles.clone().unwrap_err());
            let clean = s.lost.is_empty() && s.charges.is_empty() && node.protected.is_empty();
            rep.check(clean, "peel", Some(k), || "peeling loses, charges or protects".into());
            continue;
        }
        let input = StepInput {
            parent: &node.container,
            protected: &node.protected,
            gamma: &s.gamma,
            ell: &s.ell,
            children: [&nodes[c1].container, &nodes[c2].container],
            child_protected: [&nodes[c1].protected, &nodes[c2].protected],
        };
        let out = check_step(&input, &catalog, params.sample_res);
        for v in &out.violations {
            rep.check(false, v.name(), Some(k), || v.to_string());
        }
        rep.check(out.opt.len() >= 2, "step", Some(k), || "step on a container with fewer than two polygons".into());
        let mut recorded = s.lost.clone();
        recorded.sort_unstable();
        rep.check(recorded == out.lost, "lost", Some(k), || format!("recorded {:?}, actual {:?}", s.lost, out.lost));
        lost_all.extend(out.lost.iter().copied());

        for &(a, b) in &s.charges {
            let ok = out.lost.contains(&a)
                && acc.contains(&a)
                && catalog.seeing.seen[a].contains(&b)
                && out.opt.contains(&b);
            rep.check(ok, "charge", Some(k), || {
                format!("charge {a}>{b} is not a lost polygon charged to one it sees here")
            });
            rep.check(charged_sources.insert(a), "charge-injectivity", Some(k), || {
                format!("polygon {a} charged twice")
            });
            let prev = targets.insert(b, k);
            rep.check(prev.is_none(), "charge-injectivity", Some(k), || format!("polygon {b} receives two charges"));
            let prot = (0..2).any(|i| out.child_opt[i].contains(&b) && nodes[s.children[i]].protected.contains(&b));
            rep.check(prot, "charge", Some(k), || format!("charged polygon {b} is not protected"));
        }
        for &p in out.lost.iter().filter(|p| acc.contains(p)) {
            let ok = s.charges.iter().any(|&(a, _)| a == p);
            rep.check(ok, "charge", Some(k), || format!("lost accountable polygon {p} is not charged"));
        }
        for &q in &out.lost {
            let Some(seer) = catalog.seeing.seer[q] else { continue };
            for i in 0..2 {
                if out.child_opt[i].contains(&seer) {
                    let ok = nodes[s.children[i]].protected.contains(&seer);
                    rep.check(ok, "seer-protection", Some(k), || {
                        format!("seer {seer} of lost polygon {q} unprotected")
                    });
                }
            }
        }
    }
    kept.sort_unstable();
    for p in 0..n {
        let k = kept.iter().filter(|&&q| q == p).count();
        let lost = lost_all.contains(&p);
        rep.check(k + lost as usize == 1, "coverage", None, || format!("polygon {p} kept {k} times, lost {lost}"));
    }
    for &b in targets.keys() {
        rep.check(kept.contains(&b), "charge", None, || format!("charged polygon {b} is not kept"));
    }
    rep.summary = BoundSummary {
        r: kept.len(),
        z: z.len(),
        p: acc.len(),
        opt: n,
        kept_accountable: kept.iter().filter(|p| acc.contains(p)).count(),
        charged: charged_sources.len(),
        d: ni.d(),
    };
    let s = rep.summary.clone();
    for &p in &z {
        rep.check(kept.contains(&p), "bound", None, || format!("corner polygon {p} not kept"));
    }
    rep.check(s.ledger_ok(), "bound", None, || format!("ledger fails: {s}"));
    rep.check(s.half_ok(), "bound", None, || format!("|R| below |Z| + ceil(|P|/2): {s}"));
    rep.check(s.ratio_ok(n), "bound", None, || format!("|R| below 3|OPT|/8d: {s}"));
    rep
}
