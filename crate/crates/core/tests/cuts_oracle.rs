// SPDX-License-Identifier: Apache-2.0

//! Merge-based cut enumeration against the recursive expansion oracle in
//! `common`.

mod common;

use std::collections::{BTreeSet, HashMap};

use common::{merge_cuts, oracle_cuts};
use kcut::locking::{lock, LockConfig};
use kcut::lockid::{builtin_templates, label_lock_gates};
use kcut::normalize::normalize;
use kcut::{parse_bench, GateGraph, LockScheme};

fn corpus() -> Vec<(String, GateGraph)> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/iscas85");
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let raw = parse_bench(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let name = p.file_stem().unwrap().to_string_lossy().into_owned();
        let norm = normalize(&raw).unwrap().0;
        if raw.gate_count() <= 200 {
            out.push((format!("{name} (as parsed)"), raw));
        }
        if norm.gate_count() <= 200 {
            out.push((format!("{name} (normalized)"), norm));
        }
    }
    // Labeled lock gates are terminals.
    let c17 = out.iter().find(|(n, _)| n == "c17 (normalized)").unwrap().1.clone();
    let locked = lock(&c17, &LockConfig::new(LockScheme::Trll, 3, 1)).unwrap();
    let (labeled, _) = label_lock_gates(&normalize(&locked.graph).unwrap().0, &builtin_templates(LockScheme::Trll), None);
    assert!(labeled.lock_gates().next().is_some());
    out.push(("c17 locked".into(), labeled));
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn merge_enumeration_equals_expansion_oracle() {
    let designs = corpus();
    assert!(designs.len() >= 3, "c17, c432 and c499 qualify");
    for (name, g) in &designs {
        for k in [3, 4] {
            let mut memo = HashMap::new();
            for root in g.gates().filter(|&r| !g.is_lock(r)) {
                assert_eq!(
                    merge_cuts(g, root, k),
                    oracle_cuts(g, root, k, &mut memo),
                    "{name} k={k} root {}",
                    g.name(root)
                );
            }
        }
    }
}

#[test]
fn reconvergent_cuts_by_hand() {
    // y = AND(a, b) with a = NOT(c), b = AND(a, d). Cuts of y: {a,b}, {c,b},
    // {a,d}, {c,d}, and {a,c,d} from {a} on the first fanin with {c,d} on
    // the second.
    let g = parse_bench("INPUT(c)\nINPUT(d)\nOUTPUT(y)\na = NOT(c)\nb = AND(a, d)\ny = AND(a, b)\n").unwrap();
    let id = |n: &str| g.find(n).unwrap().0;
    let (a, b, c, d) = (id("a"), id("b"), id("c"), id("d"));
    let mut want: BTreeSet<Vec<u32>> = BTreeSet::new();
    for s in [vec![a, b], vec![c, b], vec![a, d], vec![c, d], vec![a, c, d]] {
        let mut s = s;
        s.sort();
        want.insert(s);
    }
    let y = g.find("y").unwrap();
    assert_eq!(oracle_cuts(&g, y, 3, &mut HashMap::new()), want);
    assert_eq!(merge_cuts(&g, y, 3), want);
    want.retain(|s| s.len() <= 2);
    assert_eq!(merge_cuts(&g, y, 2), want);
}
