// SPDX-License-Identifier: Apache-2.0

use super::{LockConfig, LockCtx, LockError, LockedDesign};
use crate::netlist::{GateGraph, GateKind, LockScheme, NodeKind};

/// LUT locking: `key_size / 4` random 2-input gates become 2-input LUTs
/// whose 4 configuration bits are key inputs. Row `2·b + a` of a gate
/// `g(a, b)` is configured by key bit `4·j + 2·b + a` of LUT `j`. The LUT is
/// a tree of three 2:1 MUXes, each `lo ^ (s & (lo ^ hi))` (9 gates); its output keeps the gate's name.
pub fn lock_lut(g: &GateGraph, cfg: &LockConfig) -> Result<LockedDesign, LockError> {
    cfg.expect(LockScheme::Lut)?;
    let mut cx = LockCtx::new(g, cfg.seed);
    let candidates: Vec<usize> = cx
        .original_gates()
        .into_iter()
        .filter(|&i| cx.ed.nodes[i].fanins.len() == 2 && cx.ed.kind(i).is_some_and(|k| !k.is_unary()))
        .collect();
    let needed = cfg.key_size / 4;
    if candidates.len() < needed {
        return Err(LockError::TooFewSites {
            scheme: LockScheme::Lut,
            needed,
            available: candidates.len(),
        });
    }
    let mut sites = super::shuffled(&candidates, &mut cx.rng);
    sites.truncate(needed);
    for (j, &site) in sites.iter().enumerate() {
        let kind = cx.ed.kind(site).unwrap();
        let (a, b) = (cx.ed.nodes[site].fanins[0], cx.ed.nodes[site].fanins[1]);
        let rows = kind.eval_words(&[0b1010, 0b1100]);
        let k: Vec<usize> = (0..4).map(|r| cx.key_input((rows >> r) & 1 == 1)).collect();
        let base = format!("lut_{j}");
        // s ? hi : lo as lo ^ (s & (lo ^ hi)): every gate lies downstream of a key.
        let row_mux = |cx: &mut LockCtx, m: usize, hi: usize, lo: usize| {
            let d = cx.gate(&format!("{base}_m{m}_d"), GateKind::Xor, vec![lo, hi]);
            let s = cx.gate(&format!("{base}_m{m}_s"), GateKind::And, vec![a, d]);
            cx.gate(&format!("{base}_m{m}"), GateKind::Xor, vec![lo, s])
        };
        let m0 = row_mux(&mut cx, 0, k[1], k[0]);
        let m1 = row_mux(&mut cx, 1, k[3], k[2]);
        // The output stage is built in place so the site keeps its name.
        let d = cx.gate(&format!("{base}_d"), GateKind::Xor, vec![m0, m1]);
        let sel = cx.gate(&format!("{base}_s"), GateKind::And, vec![b, d]);
        let node = &mut cx.ed.nodes[site];
        node.kind = NodeKind::Gate(GateKind::Xor);
        node.fanins = vec![m0, sel];
        cx.truth.push(site);
    }
    cx.finish(LockScheme::Lut)
}

#[cfg(test)]
mod tests {
    use super::super::tests::bench;
    use super::super::*;
    use crate::netlist::parse_bench;
    use crate::sim::PatternSet;

    fn nand() -> GateGraph {
        parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)\n").unwrap()
    }

    /// Configuration read from row 3 down to row 0.
    fn config(l: &LockedDesign) -> String {
        l.key.key_bits.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn nand_lut_config() {
        let g = nand();
        let l = lock_lut(&g, &LockConfig::new(LockScheme::Lut, 4, 0)).unwrap();
        assert_eq!(config(&l), "0111");
        assert_eq!(l.graph.gate_count(), 9);
        assert_eq!(l.key.ground_truth_lock_gates.len(), 9);
        assert!(l.key.ground_truth_lock_gates.contains(&"y".to_string()));
        let p = PatternSet::exhaustive(2);
        check_equivalence(&g, &l.graph, &l.key.assignment(), &p).unwrap();
    }

    #[test]
    fn wrong_config_realizes_another_function() {
        let g = nand();
        let l = lock_lut(&g, &LockConfig::new(LockScheme::Lut, 4, 0)).unwrap();
        // Rows 3..0 = 1000: only a = b = 1 gives 1.
        let wrong: Vec<(String, bool)> = l
            .key
            .key_input_names
            .iter()
            .cloned()
            .zip([false, false, false, true])
            .collect();
        let and = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n").unwrap();
        let p = PatternSet::exhaustive(2);
        check_equivalence(&and, &l.graph, &wrong, &p).unwrap();
        assert!(check_equivalence(&g, &l.graph, &wrong, &p).is_err());
    }

    #[test]
    fn c2670_overhead() {
        let g = bench("c2670");
        let l = lock_lut(&g, &LockConfig::new(LockScheme::Lut, 32, 1)).unwrap();
        verify_correct_key(&g, &l, 1000, 1).unwrap();
        let r = overhead(&g, &l.graph).unwrap();
        assert!(r > 1.0 && r < 1.2, "{r}");
    }
}
