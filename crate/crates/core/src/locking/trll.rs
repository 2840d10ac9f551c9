// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::{LockConfig, LockCtx, LockError, LockedDesign};
use crate::netlist::{GateGraph, GateKind, LockScheme, NodeId};

/// TRLL-style bitwise locking. Each key bit either absorbs an inverter into
/// a key gate (XOR with key 1 or XNOR with key 0) or inserts a
/// non-inverting key gate on a random wire (XOR with key 0 or XNOR with
/// key 1). NAND, NOR and XNOR count as their base gate followed by an
/// inverter; the base gate keeps its name and is not ground truth.
pub fn lock_trll(g: &GateGraph, cfg: &LockConfig) -> Result<LockedDesign, LockError> {
    cfg.expect(LockScheme::Trll)?;
    let mut cx = LockCtx::new(g, cfg.seed);
    let gates = cx.original_gates();
    if gates.len() < cfg.key_size {
        return Err(LockError::TooFewSites {
            scheme: LockScheme::Trll,
            needed: cfg.key_size,
            available: gates.len(),
        });
    }
    let mut inverting: Vec<usize> = gates
        .iter()
        .copied()
        .filter(|&i| cx.ed.kind(i).is_some_and(GateKind::is_inverting))
        .collect();
    let mut plain = gates;
    inverting = super::shuffled(&inverting, &mut cx.rng);
    plain = super::shuffled(&plain, &mut cx.rng);
    let mut used = vec![false; cx.ed.nodes.len()];
    for _ in 0..cfg.key_size {
        inverting.retain(|&i| !used[i]);
        plain.retain(|&i| !used[i]);
        let absorb = !inverting.is_empty() && (plain.is_empty() || cx.rng.gen::<bool>());
        let xnor = cx.rng.gen::<bool>();
        let site = if absorb { inverting.pop() } else { plain.pop() }.expect("site count checked");
        used[site] = true;
        if absorb {
            absorb_inverter(&mut cx, site, xnor);
        } else {
            insert_on_wire(&mut cx, site, xnor);
        }
    }
    cx.finish(LockScheme::Trll)
}

/// Inverter absorption at explicit gates, each with an XOR key gate and key
/// bit 1. Every site must be NOT, NAND, NOR or XNOR.
pub fn lock_trll_at(g: &GateGraph, sites: &[NodeId]) -> Result<LockedDesign, LockError> {
    let mut cx = LockCtx::new(g, 0);
    for &s in sites {
        match g.node(s).gate_kind() {
            Some(k) if k.is_inverting() => absorb_inverter(&mut cx, s.index(), false),
            _ => {
                return Err(LockError::Config(format!(
                    "`{}` is not an inverting gate",
                    g.name(s)
                )))
            }
        }
    }
    cx.finish(LockScheme::Trll)
}

fn absorb_inverter(cx: &mut LockCtx, site: usize, xnor: bool) {
    let kind = cx.ed.kind(site).expect("site is a gate");
    let key = cx.key_input(!xnor);
    let gk = if xnor { GateKind::Xnor } else { GateKind::Xor };
    if kind == GateKind::Not {
        // NOT(x) == XOR(x, 1): the inverter itself becomes the key gate.
        let node = &mut cx.ed.nodes[site];
        node.kind = crate::netlist::NodeKind::Gate(gk);
        node.fanins.push(key);
        cx.truth.push(site);
    } else {
        cx.ed.nodes[site].kind = crate::netlist::NodeKind::Gate(kind.base());
        let name = format!("trll_{}", cx.keys.len() - 1);
        let kg = cx.gate(&name, gk, vec![site, key]);
        cx.ed.redirect(site, kg, &[kg]);
    }
}

fn insert_on_wire(cx: &mut LockCtx, site: usize, xnor: bool) {
    let key = cx.key_input(xnor);
    let gk = if xnor { GateKind::Xnor } else { GateKind::Xor };
    let name = format!("trll_{}", cx.keys.len() - 1);
    let kg = cx.gate(&name, gk, vec![site, key]);
    cx.ed.redirect(site, kg, &[kg]);
}

#[cfg(test)]
mod tests {
    use super::super::tests::{bench, c17};
    use super::super::*;
    use crate::sim::{eval, PatternSet};

    #[test]
    fn absorbing_one_nand() {
        let g = c17();
        let l = lock_trll_at(&g, &[g.find("23").unwrap()]).unwrap();
        assert_eq!(l.key.key_bits, vec![true]);
        assert_eq!(l.key.ground_truth_lock_gates, vec!["trll_0"]);
        let kg = l.graph.find("trll_0").unwrap();
        assert_eq!(l.graph.node(kg).gate_kind(), Some(GateKind::Xor));
        let base = l.graph.find("23").unwrap();
        assert_eq!(l.graph.node(base).gate_kind(), Some(GateKind::And));
        verify_correct_key(&g, &l, 0, 0).unwrap();
    }

    #[test]
    fn flipped_key_corrupts_c17() {
        let g = c17();
        let l = lock_trll(&g, &LockConfig::new(LockScheme::Trll, 3, 7)).unwrap();
        let flipped: Vec<(String, bool)> = l.key.assignment().into_iter().map(|(n, b)| (n, !b)).collect();
        let p = PatternSet::exhaustive(5);
        assert!(crate::sim::check_equivalence(&g, &l.graph, &flipped, &p).is_err());
        let mut a: std::collections::HashMap<String, bool> =
            ["1", "2", "3", "6", "7"].iter().map(|n| (n.to_string(), true)).collect();
        a.extend(l.key.assignment());
        assert_eq!(eval(&g, &a), eval(&l.graph, &a));
    }

    #[test]
    fn c880_random_vectors() {
        let g = bench("c880");
        for seed in 0..3 {
            let l = lock_trll(&g, &LockConfig::new(LockScheme::Trll, 64, seed)).unwrap();
            assert_eq!(verify_correct_key(&g, &l, 1000, seed).unwrap(), 1000);
            assert_eq!(l.key.ground_truth_lock_gates.len(), 64);
        }
    }

    #[test]
    fn too_few_sites() {
        let g = c17();
        assert!(matches!(
            lock_trll(&g, &LockConfig::new(LockScheme::Trll, 7, 0)),
            Err(LockError::TooFewSites { .. })
        ));
    }
}
