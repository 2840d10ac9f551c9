// SPDX-License-Identifier: Apache-2.0

//! Lock-gate identification by functional template matching.
//!
//! Starting from the key inputs, small cuts rooted near keys (or near gates
//! already labeled) are canonicalized and compared with a per-scheme
//! template database. A match labels the cut's interior; labeling repeats
//! until nothing changes, which lets comparator trees be climbed one adder
//! cell at a time.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cuts::{cut_truth_table, enumerate_cuts_within, is_root_candidate, Cut, CutConfig};
use crate::netlist::{GateGraph, KeyRecord, LockScheme, NodeId};
use crate::npn::{canonical, NpnClass, TruthTable};

/// Which nets may satisfy a template's bound leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Binding {
    /// Key inputs only.
    Key,
    /// Key inputs or outputs of gates already labeled.
    KeyOrLabeled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LockTemplate {
    pub scheme: LockScheme,
    pub name: &'static str,
    pub class: NpnClass,
    pub binding: Binding,
    /// Minimum number of cut leaves that must be bound.
    pub min_bound: usize,
    /// Largest distance, in gates, from a bound net to the cut root.
    pub max_depth: usize,
}

impl LockTemplate {
    pub fn new(
        scheme: LockScheme,
        name: &'static str,
        function: TruthTable,
        binding: Binding,
        min_bound: usize,
        max_depth: usize,
    ) -> Self {
        assert!(function.k() <= 6 && min_bound >= 1 && min_bound <= function.k());
        Self {
            scheme,
            name,
            class: canonical(&function),
            binding,
            min_bound,
            max_depth,
        }
    }

    pub fn arity(&self) -> usize {
        self.class.canonical.k()
    }
}

/// `s ? a : b` with inputs (s, a, b).
pub fn mux_function() -> TruthTable {
    TruthTable::from_fn(3, |r| if r & 1 == 1 { r & 2 != 0 } else { r & 4 != 0 })
}

/// 2-input LUT over inputs (a, b, k0, k1, k2, k3): output `k[2b + a]`.
pub fn lut2_function() -> TruthTable {
    TruthTable::from_fn(6, |r| {
        let row = (r & 1) | (r & 2);
        (r >> (2 + row)) & 1 == 1
    })
}

/// Template database for one scheme.
pub fn builtin_templates(scheme: LockScheme) -> Vec<LockTemplate> {
    use Binding::*;
    let xor2 = TruthTable::from_u64(2, 0x6);
    let and2 = TruthTable::from_u64(2, 0x8);
    let xor3 = TruthTable::from_u64(3, 0x96);
    let maj3 = TruthTable::from_u64(3, 0xe8);
    let t = LockTemplate::new;
    match scheme {
        LockScheme::Trll => vec![t(scheme, "xor-key", xor2, Key, 1, 1)],
        LockScheme::Mux => vec![t(scheme, "mux-key-select", mux_function(), Key, 1, 2)],
        LockScheme::Lut => vec![
            t(scheme, "lut2", lut2_function(), Key, 4, 4),
            t(scheme, "lut-row-mux", mux_function(), Key, 2, 2),
            t(scheme, "lut-out-mux", mux_function(), KeyOrLabeled, 2, 2),
        ],
        LockScheme::SfllHd => vec![
            t(scheme, "xor", xor2, KeyOrLabeled, 1, 2),
            t(scheme, "and", and2, KeyOrLabeled, 2, 2),
            t(scheme, "sum", xor3, KeyOrLabeled, 3, 2),
            t(scheme, "carry", maj3, KeyOrLabeled, 3, 2),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelReport {
    pub labeled_gates: BTreeSet<String>,
    /// Present when ground truth was supplied and something was labeled.
    pub precision: Option<f64>,
    /// Present when ground truth was supplied and is non-empty.
    pub recall: Option<f64>,
    pub rounds: usize,
}

impl LabelReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Labels lock gates of `g` (key inputs must be flagged). Returns the graph
/// with lock labels set and the report; `truth` enables precision/recall.
pub fn label_lock_gates(
    g: &GateGraph,
    templates: &[LockTemplate],
    truth: Option<&KeyRecord>,
) -> (GateGraph, LabelReport) {
    let keys: Vec<NodeId> = g.key_inputs().collect();
    let region = {
        let mut r = g.fanout_closure(keys.iter().copied());
        for &k in &keys {
            r[k.index()] = false;
        }
        r
    };
    let mut labels = vec![false; g.len()];
    for id in g.gates() {
        labels[id.index()] = g.is_lock(id) && region[id.index()];
    }
    let key_depth = distances(g, keys.iter().copied());
    let mut classes: HashMap<TruthTable, NpnClass> = HashMap::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let current = g.with_lock_labels(&as_set(&labels));
        let bound_depth = distances(
            g,
            keys.iter().copied().chain(g.gates().filter(|id| labels[id.index()])),
        );
        let mut changed = false;
        let mut next = labels.clone();
        for r in g.gates() {
            if !region[r.index()] || labels[r.index()] || !is_root_candidate(&current, r) {
                continue;
            }
            let mut cuts_by_arity: HashMap<usize, Vec<Cut>> = HashMap::new();
            for t in templates {
                let depth = match t.binding {
                    Binding::Key => key_depth[r.index()],
                    Binding::KeyOrLabeled => bound_depth[r.index()],
                };
                if depth > t.max_depth {
                    continue;
                }
                let cuts = cuts_by_arity.entry(t.arity()).or_insert_with(|| {
                    let cfg = CutConfig {
                        k: t.arity().max(2),
                        max_search: 100_000,
                        n_select: 1,
                    };
                    let mut v = enumerate_cuts_within(&current, r, &cfg, t.max_depth + 4).unwrap_or_default();
                    v.retain(|c| c.leaves.len() == t.arity());
                    v.sort_by(|a, b| a.interior.len().cmp(&b.interior.len()).then_with(|| a.leaves.cmp(&b.leaves)));
                    v
                });
                let hit = cuts.iter().find(|c| {
                    let bound = c
                        .leaves
                        .iter()
                        .filter(|&&l| {
                            g.node(l).key || (t.binding == Binding::KeyOrLabeled && labels[l.index()])
                        })
                        .count();
                    bound >= t.min_bound && {
                        let tt = cut_truth_table(&current, c);
                        classes.entry(tt).or_insert_with(|| canonical(&tt)).canonical == t.class.canonical
                    }
                });
                if let Some(c) = hit {
                    for &n in &c.interior {
                        if region[n.index()] && !next[n.index()] {
                            next[n.index()] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        labels = next;
        if !changed {
            break;
        }
    }
    let labeled = g.with_lock_labels(&as_set(&labels));
    let names: BTreeSet<String> = labeled.lock_gates().map(|id| g.name(id).to_string()).collect();
    let (precision, recall) = match truth {
        Some(rec) => {
            let truth: HashSet<&str> = rec.ground_truth_lock_gates.iter().map(String::as_str).collect();
            let tp = names.iter().filter(|n| truth.contains(n.as_str())).count() as f64;
            (
                (!names.is_empty()).then(|| tp / names.len() as f64),
                (!truth.is_empty()).then(|| tp / truth.len() as f64),
            )
        }
        None => (None, None),
    };
    (
        labeled,
        LabelReport {
            labeled_gates: names,
            precision,
            recall,
            rounds,
        },
    )
}

fn as_set(labels: &[bool]) -> HashSet<NodeId> {
    labels
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| NodeId(i as u32))
        .collect()
}

/// Gate-hop distance along fanouts from the nearest seed.
fn distances(g: &GateGraph, seeds: impl Iterator<Item = NodeId>) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.len()];
    let mut q = VecDeque::new();
    for s in seeds {
        if d[s.index()] != 0 {
            d[s.index()] = 0;
            q.push_back(s);
        }
    }
    while let Some(v) = q.pop_front() {
        for &w in g.fanouts(v) {
            if d[w.index()] == usize::MAX {
                d[w.index()] = d[v.index()] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locking::{lock, lock_trll_at, LockConfig};
    use crate::netlist::{parse_bench, GateKind};
    use crate::npn::npn_equivalent;

    fn c17() -> GateGraph {
        parse_bench(include_str!("../data/iscas85/c17.bench")).unwrap()
    }

    #[test]
    fn template_contents() {
        let trll = builtin_templates(LockScheme::Trll);
        assert_eq!(trll[0].class.canonical, canonical(&TruthTable::from_u64(2, 0x6)).canonical);
        assert_eq!((trll[0].binding, trll[0].min_bound), (Binding::Key, 1));
        // The MUX template is the class of the decomposed NOT/AND/OR structure.
        let g = parse_bench(
            "INPUT(s)\nINPUT(a)\nINPUT(b)\nOUTPUT(y)\nns = NOT(s)\nt = AND(s, a)\nf = AND(ns, b)\ny = OR(t, f)\n",
        )
        .unwrap();
        let cut = crate::cuts::enumerate_cuts(&g, g.find("y").unwrap(), &CutConfig::new(3, 10).unwrap())
            .unwrap()
            .into_iter()
            .find(|c| c.leaves.len() == 3 && c.leaves.iter().all(|&l| g.node(l).is_input()))
            .unwrap();
        let mux = &builtin_templates(LockScheme::Mux)[0];
        assert!(npn_equivalent(&cut_truth_table(&g, &cut), &mux_function()).unwrap());
        assert_eq!(mux.class, canonical(&cut_truth_table(&g, &cut)));
    }

    #[test]
    fn no_keys_no_labels() {
        let (_, r) = label_lock_gates(&c17(), &builtin_templates(LockScheme::Trll), None);
        assert!(r.labeled_gates.is_empty());
        assert_eq!(r.recall, None);
    }

    #[test]
    fn fig1_key_gates() {
        let g = c17();
        let sites: Vec<NodeId> = ["10", "11", "23"].iter().map(|n| g.find(n).unwrap()).collect();
        let l = lock_trll_at(&g, &sites).unwrap();
        let (lab, r) = label_lock_gates(&l.graph, &builtin_templates(LockScheme::Trll), Some(&l.key));
        assert_eq!(r.labeled_gates, l.key.ground_truth_lock_gates.iter().cloned().collect());
        assert_eq!((r.precision, r.recall), (Some(1.0), Some(1.0)));
        for id in lab.lock_gates() {
            assert_eq!(lab.node(id).gate_kind(), Some(GateKind::Xor));
        }
    }

    #[test]
    fn sfll_restore_block_fully_labeled() {
        let mut s = String::new();
        for i in 0..8 {
            s += &format!("INPUT(x{i})\n");
        }
        s += "OUTPUT(y)\ny = AND(x0, x1)\n";
        let g = parse_bench(&s).unwrap();
        let l = lock(&g, &LockConfig::new(LockScheme::SfllHd, 8, 2)).unwrap();
        let (_, r) = label_lock_gates(&l.graph, &builtin_templates(LockScheme::SfllHd), Some(&l.key));
        let restore: Vec<&String> = l
            .key
            .ground_truth_lock_gates
            .iter()
            .filter(|n| n.starts_with("sfll_r") || *n == "sfll_out")
            .collect();
        for n in &restore {
            assert!(r.labeled_gates.contains(*n), "{n} unlabeled");
        }
        assert_eq!(r.precision, Some(1.0));
    }

    #[test]
    fn labeling_is_a_fixpoint() {
        let g = c17();
        for scheme in LockScheme::ALL {
            let l = lock(&g, &LockConfig::new(scheme, 4, 9)).unwrap();
            let t = builtin_templates(scheme);
            let (once, r1) = label_lock_gates(&l.graph, &t, None);
            let (_, r2) = label_lock_gates(&once, &t, None);
            assert_eq!(r1.labeled_gates, r2.labeled_gates, "{scheme}");
            let reach = l.graph.fanout_closure(l.graph.key_inputs());
            for id in once.lock_gates() {
                assert!(reach[id.index()]);
            }
        }
    }
}
