// SPDX-License-Identifier: Apache-2.0

//! k-feasible cut enumeration with a per-node search cap and top-N
//! selection by cut volume.
//!
//! Cut sets are built bottom-up: a node's cuts are its trivial cut plus every
//! union of one cut per fanin that has at most `k` leaves. Primary inputs,
//! constants and lock-labeled gates are terminals; their only cut is the
//! trivial one, so enumeration never walks through a lock gate but may use
//! its output net as a leaf. BUF and NOT gates pass their fanin's cuts
//! through, are never roots and do not count towards volume.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::netlist::{GateGraph, GateKind, NodeId, NodeKind};
use crate::npn::TruthTable;

pub const MAX_K: usize = 8;
pub const DEFAULT_MAX_SEARCH: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutError {
    #[error("invalid cut configuration: {0}")]
    Config(String),
    #[error("root `{0}` is lock-labeled")]
    LockedRoot(String),
    #[error("root id {0} is out of range or not a gate")]
    BadRoot(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CutConfig {
    pub k: usize,
    pub max_search: usize,
    pub n_select: usize,
}

impl CutConfig {
    pub fn new(k: usize, n_select: usize) -> Result<Self, CutError> {
        let cfg = Self {
            k,
            max_search: DEFAULT_MAX_SEARCH,
            n_select,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn with_max_search(mut self, max_search: usize) -> Result<Self, CutError> {
        self.max_search = max_search;
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<(), CutError> {
        if !(2..=MAX_K).contains(&self.k) {
            return Err(CutError::Config(format!("k = {} outside 2..={MAX_K}", self.k)));
        }
        if self.n_select == 0 || self.max_search < self.n_select {
            return Err(CutError::Config(format!(
                "need max_search ({}) >= n_select ({}) >= 1",
                self.max_search, self.n_select
            )));
        }
        Ok(())
    }
}

/// Sorted leaf set of at most [`MAX_K`] node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafSet {
    len: u8,
    ids: [u32; MAX_K],
    // One bit per id modulo 64; a cheap lower bound on union size.
    sig: u64,
}

impl LeafSet {
    fn single(id: NodeId) -> Self {
        let mut ids = [u32::MAX; MAX_K];
        ids[0] = id.0;
        Self {
            len: 1,
            ids,
            sig: 1 << (id.0 % 64),
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids[..self.len as usize]
    }

    /// Sorted union, or `None` if it would exceed `k` leaves.
    #[inline]
    fn union(&self, other: &Self, k: usize) -> Option<Self> {
        let sig = self.sig | other.sig;
        if sig.count_ones() as usize > k {
            return None;
        }
        let (a, b) = (self.ids(), other.ids());
        let mut out = [u32::MAX; MAX_K];
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() || j < b.len() {
            let v = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(_), Some(&y)) => {
                    j += 1;
                    y
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            if n == k {
                return None;
            }
            out[n] = v;
            n += 1;
        }
        Some(Self {
            len: n as u8,
            ids: out,
            sig,
        })
    }
}

/// A cut: root gate, ordered leaves and the cone between them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cut {
    pub root: NodeId,
    /// Ascending node ids; leaf `j` is input `j` of the cut's truth table.
    pub leaves: Vec<NodeId>,
    /// Gates reached from the root without crossing a leaf (root included),
    /// ascending.
    pub interior: Vec<NodeId>,
    /// Interior gates other than BUF and NOT.
    pub volume: usize,
}

impl Cut {
    fn from_leaf_set(g: &GateGraph, root: NodeId, leaves: &LeafSet, marks: &mut Marks) -> Self {
        let leaves: Vec<NodeId> = leaves.ids().iter().map(|&i| NodeId(i)).collect();
        let interior = marks.cone(g, root, &leaves);
        let volume = interior
            .iter()
            .filter(|&&n| !g.node(n).gate_kind().is_some_and(GateKind::is_unary))
            .count();
        Self {
            root,
            leaves,
            interior,
            volume,
        }
    }

    /// Whether this is the cut whose leaves are exactly the root's fanins.
    pub fn is_fanin_cut(&self, g: &GateGraph) -> bool {
        let mut f = g.node(self.root).fanins.clone();
        f.sort_unstable();
        f.dedup();
        f == self.leaves
    }
}

/// Visit marks reused across traversals of one graph.
struct Marks {
    stamp: Vec<u32>,
    cur: u32,
}

impl Marks {
    fn new(n: usize) -> Self {
        Self {
            stamp: vec![0; n],
            cur: 0,
        }
    }

    fn cone(&mut self, g: &GateGraph, root: NodeId, leaves: &[NodeId]) -> Vec<NodeId> {
        self.cur += 1;
        let cur = self.cur;
        for l in leaves {
            self.stamp[l.index()] = cur;
        }
        self.stamp[root.index()] = cur;
        let mut interior = vec![root];
        let mut i = 0;
        while i < interior.len() {
            for &f in &g.node(interior[i]).fanins {
                if self.stamp[f.index()] != cur {
                    self.stamp[f.index()] = cur;
                    interior.push(f);
                }
            }
            i += 1;
        }
        interior.sort_unstable();
        interior
    }
}

/// Backward traversal from `root` stopping at `leaves`.
pub fn cone(g: &GateGraph, root: NodeId, leaves: &[NodeId]) -> Vec<NodeId> {
    Marks::new(g.len()).cone(g, root, leaves)
}

fn is_terminal(g: &GateGraph, id: NodeId) -> bool {
    let n = g.node(id);
    match n.kind {
        NodeKind::Input => true,
        NodeKind::Gate(k) => k.is_const() || n.lock,
    }
}

/// Gates that receive a cut list: non-lock gates other than BUF, NOT and
/// constants.
pub fn is_root_candidate(g: &GateGraph, id: NodeId) -> bool {
    let n = g.node(id);
    match n.kind {
        NodeKind::Input => false,
        NodeKind::Gate(k) => !n.lock && !k.is_unary() && !k.is_const(),
    }
}

/// Cut set of `id` from the cut sets of its fanins. The trivial cut comes
/// first; at most `max_search` non-trivial cuts are kept.
fn node_cuts(
    g: &GateGraph,
    id: NodeId,
    k: usize,
    max_search: usize,
    sets: &[Option<Vec<LeafSet>>],
    boundary: Option<&[bool]>,
) -> Vec<LeafSet> {
    let trivial = LeafSet::single(id);
    if is_terminal(g, id) || boundary.is_some_and(|b| b[id.index()]) {
        return vec![trivial];
    }
    let fanins = &g.node(id).fanins;
    let mut acc: Vec<LeafSet> = vec![LeafSet {
        len: 0,
        ids: [u32::MAX; MAX_K],
        sig: 0,
    }];
    let mut seen = rustc_hash::FxHashSet::default();
    for f in fanins {
        let fs = sets[f.index()].as_ref().expect("fanin cut set computed");
        let mut next = Vec::new();
        seen.clear();
        let sigs: Vec<u64> = fs.iter().map(|b| b.sig).collect();
        'outer: for a in &acc {
            for (j, &sb) in sigs.iter().enumerate() {
                if (a.sig | sb).count_ones() as usize > k {
                    continue;
                }
                if let Some(u) = a.union(&fs[j], k) {
                    if seen.insert(u) {
                        next.push(u);
                        if next.len() >= max_search {
                            break 'outer;
                        }
                    }
                }
            }
        }
        acc = next;
    }
    let mut out = Vec::with_capacity(acc.len() + 1);
    out.push(trivial);
    out.extend(acc.into_iter().filter(|c| *c != trivial));
    out
}

/// All cuts of `root` (trivial cut excluded), in enumeration order, with the
/// per-root cap applied.
pub fn enumerate_cuts(g: &GateGraph, root: NodeId, cfg: &CutConfig) -> Result<Vec<Cut>, CutError> {
    cuts_in_cone(g, root, cfg, None)
}

/// Cuts of `root` whose leaves lie at most `radius` gate levels behind it:
/// nodes `radius` hops back are treated as terminals.
pub fn enumerate_cuts_within(g: &GateGraph, root: NodeId, cfg: &CutConfig, radius: usize) -> Result<Vec<Cut>, CutError> {
    cuts_in_cone(g, root, cfg, Some(radius))
}

fn cuts_in_cone(g: &GateGraph, root: NodeId, cfg: &CutConfig, radius: Option<usize>) -> Result<Vec<Cut>, CutError> {
    cfg.check()?;
    if root.index() >= g.len() || g.node(root).is_input() {
        return Err(CutError::BadRoot(root.0));
    }
    if g.is_lock(root) {
        return Err(CutError::LockedRoot(g.name(root).to_string()));
    }
    let mut in_cone = vec![false; g.len()];
    let mut boundary_marks = vec![false; g.len()];
    match radius {
        None => {
            for n in g.fanin_cone(root) {
                in_cone[n.index()] = true;
            }
        }
        Some(r) => {
            in_cone[root.index()] = true;
            let mut layer = vec![root];
            for depth in 0..r.max(1) {
                let mut next = Vec::new();
                for v in layer {
                    for &f in &g.node(v).fanins {
                        if !in_cone[f.index()] {
                            in_cone[f.index()] = true;
                            next.push(f);
                        }
                    }
                }
                if depth + 1 == r.max(1) {
                    for &f in &next {
                        boundary_marks[f.index()] = true;
                    }
                }
                layer = next;
            }
        }
    }
    let boundary = radius.map(|_| boundary_marks.as_slice());
    let mut sets: Vec<Option<Vec<LeafSet>>> = vec![None; g.len()];
    for &n in g.topo_order() {
        if in_cone[n.index()] {
            sets[n.index()] = Some(node_cuts(g, n, cfg.k, cfg.max_search, &sets, boundary));
        }
    }
    let mut marks = Marks::new(g.len());
    Ok(sets[root.index()].as_ref().unwrap()[1..]
        .iter()
        .map(|ls| Cut::from_leaf_set(g, root, ls, &mut marks))
        .collect())
}

/// Keeps the `n_select` cuts with the largest volume; ties are broken by the
/// leaf list in ascending order. Independent of the input order.
pub fn select_top_cuts(mut cuts: Vec<Cut>, cfg: &CutConfig) -> Vec<Cut> {
    cuts.sort_by(|a, b| {
        b.volume
            .cmp(&a.volume)
            .then_with(|| a.leaves.cmp(&b.leaves))
    });
    cuts.truncate(cfg.n_select);
    cuts
}

/// Function of the cut root over its leaves; leaf `j` is input `j`.
pub fn cut_truth_table(g: &GateGraph, cut: &Cut) -> TruthTable {
    let k = cut.leaves.len();
    let mut values: Vec<(NodeId, [u64; 4])> = cut
        .leaves
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let mut w = [0u64; 4];
            w[..TruthTable::var(k, j).words().len()].copy_from_slice(TruthTable::var(k, j).words());
            (l, w)
        })
        .collect();
    let lookup = |values: &[(NodeId, [u64; 4])], n: NodeId| values.iter().find(|(id, _)| *id == n).map(|(_, w)| *w);
    let mut stack = vec![cut.root];
    let mut ins = Vec::with_capacity(4);
    while let Some(&v) = stack.last() {
        if lookup(&values, v).is_some() {
            stack.pop();
            continue;
        }
        let node = g.node(v);
        let pending: Vec<NodeId> = node
            .fanins
            .iter()
            .copied()
            .filter(|&f| lookup(&values, f).is_none())
            .collect();
        if !pending.is_empty() {
            stack.extend(pending);
            continue;
        }
        let kind = node.gate_kind().expect("cut interior holds gates only");
        let mut w = [0u64; 4];
        for (i, slot) in w.iter_mut().enumerate() {
            ins.clear();
            ins.extend(node.fanins.iter().map(|&f| lookup(&values, f).unwrap()[i]));
            *slot = kind.eval_words(&ins);
        }
        values.push((v, w));
        stack.pop();
    }
    let root = lookup(&values, cut.root).unwrap();
    let mut t = TruthTable::zero(k);
    let n = t.words().len();
    t.words_mut().copy_from_slice(&root[..n]);
    t.normalize_bits();
    t
}

/// Selected cuts of every root of a design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignCuts {
    pub per_root: Vec<(NodeId, Vec<Cut>)>,
}

impl DesignCuts {
    pub fn total(&self) -> usize {
        self.per_root.iter().map(|(_, c)| c.len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Cut> {
        self.per_root.iter().flat_map(|(_, c)| c.iter())
    }

    /// Debug dump: `root,leaves,interior,volume` with space-separated names.
    pub fn to_csv(&self, g: &GateGraph) -> String {
        let names = |ids: &[NodeId]| ids.iter().map(|&i| g.name(i)).collect::<Vec<_>>().join(" ");
        let mut s = String::from("root,leaves,interior,volume\n");
        for c in self.iter() {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                g.name(c.root),
                names(&c.leaves),
                names(&c.interior),
                c.volume
            );
        }
        s
    }
}

/// Topological levels: inputs at 0, gates one above their deepest fanin.
fn levels(g: &GateGraph) -> Vec<Vec<NodeId>> {
    let mut level = vec![0usize; g.len()];
    let mut out: Vec<Vec<NodeId>> = Vec::new();
    for &n in g.topo_order() {
        let l = g
            .node(n)
            .fanins
            .iter()
            .map(|f| level[f.index()] + 1)
            .max()
            .unwrap_or(0);
        level[n.index()] = l;
        if out.len() <= l {
            out.resize(l + 1, Vec::new());
        }
        out[l].push(n);
    }
    for l in &mut out {
        l.sort_unstable();
    }
    out
}

/// Enumerates and selects cuts for every root of `g`, one topological level
/// at a time. Nodes of a level are processed in parallel when `parallel` is
/// set; the result does not depend on it.
pub fn enumerate_design_with(g: &GateGraph, cfg: &CutConfig, parallel: bool) -> Result<DesignCuts, CutError> {
    cfg.check()?;
    let levels = levels(g);
    // Last level that reads each node's cut set.
    let mut last_use = vec![0usize; g.len()];
    let mut level_of = vec![0usize; g.len()];
    for (l, nodes) in levels.iter().enumerate() {
        for &n in nodes {
            level_of[n.index()] = l;
        }
    }
    for n in g.ids() {
        last_use[n.index()] = g
            .fanouts(n)
            .iter()
            .map(|w| level_of[w.index()])
            .max()
            .unwrap_or(0);
    }
    // Sets are dropped once the last level reading them is done.
    let mut freed: Vec<Vec<NodeId>> = vec![Vec::new(); levels.len()];
    for n in g.ids() {
        freed[last_use[n.index()].max(level_of[n.index()])].push(n);
    }
    let mut sets: Vec<Option<Vec<LeafSet>>> = vec![None; g.len()];
    let mut per_root: Vec<(NodeId, Vec<Cut>)> = Vec::new();
    let work = |n: NodeId, sets: &[Option<Vec<LeafSet>>]| {
        let cs = node_cuts(g, n, cfg.k, cfg.max_search, sets, None);
        let selected = if is_root_candidate(g, n) {
            let mut marks = Marks::new(g.len());
            let cuts = cs[1..]
                .iter()
                .map(|ls| Cut::from_leaf_set(g, n, ls, &mut marks))
                .collect();
            Some(select_top_cuts(cuts, cfg))
        } else {
            None
        };
        (n, cs, selected)
    };
    for (l, nodes) in levels.iter().enumerate() {
        let results: Vec<_> = if parallel {
            nodes.par_iter().map(|&n| work(n, &sets)).collect()
        } else {
            nodes.iter().map(|&n| work(n, &sets)).collect()
        };
        for (n, cs, selected) in results {
            sets[n.index()] = Some(cs);
            if let Some(sel) = selected {
                per_root.push((n, sel));
            }
        }
        for &n in &freed[l] {
            sets[n.index()] = None;
        }
    }
    per_root.sort_by_key(|(n, _)| *n);
    Ok(DesignCuts { per_root })
}

pub fn enumerate_design(g: &GateGraph, cfg: &CutConfig) -> Result<DesignCuts, CutError> {
    enumerate_design_with(g, cfg, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    fn c17() -> GateGraph {
        parse_bench(include_str!("../data/iscas85/c17.bench")).unwrap()
    }

    #[test]
    fn config_bounds() {
        assert!(CutConfig::new(1, 5).is_err());
        assert!(CutConfig::new(9, 5).is_err());
        assert!(CutConfig::new(4, 0).is_err());
        assert!(CutConfig::new(4, 20).unwrap().with_max_search(10).is_err());
    }

    #[test]
    fn two_pi_root_has_one_cut() {
        let g = c17();
        let root = g.find("10").unwrap();
        let cuts = enumerate_cuts(&g, root, &CutConfig::new(3, 20).unwrap()).unwrap();
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].volume, 1);
        let names: Vec<&str> = cuts[0].leaves.iter().map(|&l| g.name(l)).collect();
        assert_eq!(names, ["1", "3"]);
    }

    #[test]
    fn locked_root_is_rejected() {
        let g = parse_bench("# LOCKGATE y\nINPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n").unwrap();
        let cfg = CutConfig::new(3, 5).unwrap();
        assert!(matches!(
            enumerate_cuts(&g, g.find("y").unwrap(), &cfg),
            Err(CutError::LockedRoot(_))
        ));
        assert_eq!(enumerate_design(&g, &cfg).unwrap().total(), 0);
    }

    #[test]
    fn selection_is_order_independent() {
        let g = c17();
        let cfg = CutConfig::new(3, 2).unwrap();
        let root = g.find("23").unwrap();
        let cuts = enumerate_cuts(&g, root, &cfg).unwrap();
        let mut rev = cuts.clone();
        rev.reverse();
        assert_eq!(select_top_cuts(cuts.clone(), &cfg), select_top_cuts(rev, &cfg));
        let all = CutConfig::new(3, 50).unwrap();
        assert_eq!(select_top_cuts(cuts.clone(), &all).len(), cuts.len());
    }

    #[test]
    fn truth_tables_of_c17_cuts() {
        let g = c17();
        let cfg = CutConfig::new(3, 20).unwrap();
        let root = g.find("23").unwrap();
        for c in enumerate_cuts(&g, root, &cfg).unwrap() {
            let t = cut_truth_table(&g, &c);
            let names: Vec<&str> = c.leaves.iter().map(|&l| g.name(l)).collect();
            if names == ["16", "19"] {
                assert_eq!(t.to_hex(), "2:7");
            }
            if names == ["2", "7", "11"] {
                // NAND(NAND(2, 11), NAND(11, 7)) = 11 & (2 | 7)
                let want = TruthTable::from_fn(3, |r| r & 4 != 0 && r & 3 != 0);
                assert_eq!(t, want);
            }
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let g = c17();
        let cfg = CutConfig::new(3, 20).unwrap();
        assert_eq!(
            enumerate_design_with(&g, &cfg, false).unwrap(),
            enumerate_design_with(&g, &cfg, true).unwrap()
        );
    }
}
