// SPDX-License-Identifier: Apache-2.0

//! Helpers shared by the integration tests and the acceptance harness.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use kcut::cuts::{enumerate_cuts, is_root_candidate, Cut, CutConfig};
use kcut::normalize::normalize;
use kcut::{parse_bench, GateGraph, NodeId};

pub fn bench_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("data/iscas85/{name}.bench"))
}

pub fn load(name: &str) -> GateGraph {
    parse_bench(&std::fs::read_to_string(bench_path(name)).unwrap()).unwrap()
}

pub fn load_normalized(name: &str) -> GateGraph {
    normalize(&load(name)).unwrap().0
}

// Recursive expansion oracle: a node's cuts are the node itself plus every
// union of one cut per fanin, pruned at `k` leaves. Plain ordered sets, no
// caps, signatures or level scheduling.

pub type Frontier = BTreeSet<u32>;

pub fn terminal(g: &GateGraph, n: NodeId) -> bool {
    let node = g.node(n);
    node.is_input() || node.gate_kind().is_some_and(|k| k.is_const()) || g.is_lock(n)
}

pub fn expand(g: &GateGraph, n: NodeId, k: usize, memo: &mut HashMap<NodeId, BTreeSet<Frontier>>) -> BTreeSet<Frontier> {
    if let Some(c) = memo.get(&n) {
        return c.clone();
    }
    let mut out = BTreeSet::from([Frontier::from([n.0])]);
    if !terminal(g, n) {
        let mut acc = BTreeSet::from([Frontier::new()]);
        for &f in &g.node(n).fanins {
            let fc = expand(g, f, k, memo);
            let mut next = BTreeSet::new();
            for a in &acc {
                for b in &fc {
                    let u: Frontier = a.union(b).copied().collect();
                    if u.len() <= k {
                        next.insert(u);
                    }
                }
            }
            acc = next;
        }
        out.extend(acc);
    }
    memo.insert(n, out.clone());
    out
}

pub fn oracle_cuts(g: &GateGraph, root: NodeId, k: usize, memo: &mut HashMap<NodeId, BTreeSet<Frontier>>) -> BTreeSet<Vec<u32>> {
    let mut out: BTreeSet<Vec<u32>> = expand(g, root, k, memo).into_iter().map(|f| f.into_iter().collect()).collect();
    out.remove(&vec![root.0]);
    out
}

pub fn merge_cuts(g: &GateGraph, root: NodeId, k: usize) -> BTreeSet<Vec<u32>> {
    let cfg = CutConfig::new(k, 1).unwrap().with_max_search(usize::MAX).unwrap();
    enumerate_cuts(g, root, &cfg)
        .unwrap()
        .into_iter()
        .map(|c| c.leaves.iter().map(|l| l.0).collect())
        .collect()
}

// The c17 walk-through.

pub const C17: &str = include_str!("../../data/iscas85/c17.bench");

/// Gate labels of the walk-through, by net name.
pub fn label(net: &str) -> &'static str {
    match net {
        "10" => "G0",
        "11" => "G1",
        "16" => "G2",
        "19" => "G3",
        "22" => "G4",
        "23" => "G5",
        _ => panic!("unexpected interior net {net}"),
    }
}

pub fn cuts_with_volume(g: &GateGraph, k: usize, min_volume: usize) -> Vec<Cut> {
    let cfg = CutConfig::new(k, 1).unwrap();
    g.gates()
        .filter(|&r| is_root_candidate(g, r))
        .flat_map(|r| enumerate_cuts(g, r, &cfg).unwrap())
        .filter(|c| c.volume >= min_volume)
        .collect()
}

pub fn interior_labels(g: &GateGraph, c: &Cut) -> BTreeSet<&'static str> {
    c.interior.iter().map(|&n| label(g.name(n))).collect()
}

pub fn sets(list: &[&[&'static str]]) -> BTreeSet<BTreeSet<&'static str>> {
    list.iter().map(|s| s.iter().copied().collect()).collect()
}

