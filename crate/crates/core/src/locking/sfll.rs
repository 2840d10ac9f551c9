// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::{LockConfig, LockCtx, LockError, LockedDesign};
use crate::netlist::{GateGraph, GateKind, KeyRecord, LockScheme, NodeId};

/// SFLL-HD on one output. The strip unit flips the protected output when the
/// Hamming distance between the protected inputs and a secret pattern equals
/// `hd`; the restore unit flips it back when the distance between the
/// protected inputs and the key equals `hd`. Both distances come from a
/// population-count adder tree compared against the constant `hd`.
///
/// The protected output is the one with the largest fanin cone (first on
/// ties); the protected inputs are the `key_size` lexicographically smallest
/// data-input names, matched to key bits in that order.
pub fn lock_sfll_hd(g: &GateGraph, cfg: &LockConfig) -> Result<LockedDesign, LockError> {
    cfg.expect(LockScheme::SfllHd)?;
    let mut data: Vec<NodeId> = g.data_inputs().collect();
    if cfg.key_size > data.len() {
        return Err(LockError::Config(format!(
            "key size {} exceeds {} primary inputs",
            cfg.key_size,
            data.len()
        )));
    }
    data.sort_by(|&a, &b| g.name(a).cmp(g.name(b)));
    data.truncate(cfg.key_size);
    let (po_pos, _) = g
        .outputs()
        .iter()
        .enumerate()
        .map(|(i, &o)| (i, g.fanin_cone(o).len()))
        .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });

    let mut cx = LockCtx::new(g, cfg.seed);
    let secret: Vec<bool> = (0..cfg.key_size).map(|_| cx.rng.gen()).collect();
    let xs: Vec<usize> = data.iter().map(|x| x.index()).collect();

    let strip_bits: Vec<usize> = xs
        .iter()
        .zip(&secret)
        .enumerate()
        .map(|(i, (&x, &p))| {
            if p {
                cx.gate(&format!("sfll_s{i}_lit"), GateKind::Not, vec![x])
            } else {
                x
            }
        })
        .collect();
    let strip = hd_equals(&mut cx, "sfll_s", &strip_bits, cfg.hd(), "sfll_strip");

    let restore_bits: Vec<usize> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let k = cx.key_input(secret[i]);
            cx.gate(&format!("sfll_r{i}_x"), GateKind::Xor, vec![x, k])
        })
        .collect();
    let restore = hd_equals(&mut cx, "sfll_r", &restore_bits, cfg.hd(), "sfll_restore");

    let orig = cx.ed.outputs[po_pos];
    let flip = cx.gate("sfll_flip", GateKind::Xor, vec![orig, strip]);
    let out = cx.gate("sfll_out", GateKind::Xor, vec![flip, restore]);
    cx.ed.outputs[po_pos] = out;
    cx.finish(LockScheme::SfllHd)
}

/// Gate computing `popcount(bits) == hd`, named `out_name`.
fn hd_equals(cx: &mut LockCtx, prefix: &str, bits: &[usize], hd: usize, out_name: &str) -> usize {
    let sum = popcount(cx, prefix, bits);
    let width = usize::BITS as usize - bits.len().leading_zeros() as usize;
    let mut lits = Vec::new();
    for w in 0..width {
        let want = (hd >> w) & 1 == 1;
        match sum.get(w).copied().flatten() {
            Some(s) if want => lits.push(s),
            Some(s) => lits.push(cx.gate(&format!("{prefix}_eq{w}"), GateKind::Not, vec![s])),
            None => debug_assert!(!want, "hd within key size"),
        }
    }
    let mut acc = lits[0];
    let last = lits.len() - 1;
    for (i, &l) in lits.iter().enumerate().skip(1) {
        let name = if i == last {
            out_name.to_string()
        } else {
            format!("{prefix}_and{i}")
        };
        acc = cx.gate(&name, GateKind::And, vec![acc, l]);
    }
    if last == 0 {
        acc = cx.gate(out_name, GateKind::Buf, vec![acc]);
    }
    acc
}

/// Column-compression population count: full adders reduce each weight to a
/// single bit, half adders finish pairs. Entry `w` is the bit of weight
/// `2^w`, or `None` when that column is empty.
fn popcount(cx: &mut LockCtx, prefix: &str, bits: &[usize]) -> Vec<Option<usize>> {
    let mut cols: Vec<Vec<usize>> = vec![bits.to_vec()];
    let mut out = Vec::new();
    let mut n = 0usize;
    let mut w = 0;
    while w < cols.len() {
        while cols[w].len() > 1 {
            if cols.len() == w + 1 {
                cols.push(Vec::new());
            }
            let name = format!("{prefix}_a{n}");
            n += 1;
            if cols[w].len() >= 3 {
                let (a, b, c) = (cols[w].remove(0), cols[w].remove(0), cols[w].remove(0));
                let t = cx.gate(&format!("{name}_t"), GateKind::Xor, vec![a, b]);
                let s = cx.gate(&format!("{name}_s"), GateKind::Xor, vec![t, c]);
                let g1 = cx.gate(&format!("{name}_g"), GateKind::And, vec![a, b]);
                let g2 = cx.gate(&format!("{name}_p"), GateKind::And, vec![t, c]);
                let co = cx.gate(&format!("{name}_c"), GateKind::Or, vec![g1, g2]);
                cols[w].push(s);
                cols[w + 1].push(co);
            } else {
                let (a, b) = (cols[w].remove(0), cols[w].remove(0));
                let s = cx.gate(&format!("{name}_s"), GateKind::Xor, vec![a, b]);
                let co = cx.gate(&format!("{name}_c"), GateKind::And, vec![a, b]);
                cols[w].push(s);
                cols[w + 1].push(co);
            }
        }
        out.push(cols[w].first().copied());
        w += 1;
    }
    out
}

/// Protected data inputs of an SFLL-HD article in key-bit order: the data
/// operand of each key input's restore XOR.
pub fn protected_inputs(locked: &GateGraph, key: &KeyRecord) -> Vec<String> {
    key.key_input_names
        .iter()
        .filter_map(|k| {
            let kid = locked.find(k)?;
            locked.fanouts(kid).iter().find_map(|&x| {
                let n = locked.node(x);
                (n.gate_kind() == Some(GateKind::Xor))
                    .then(|| n.fanins.iter().find(|&&f| f != kid).copied())
                    .flatten()
                    .map(|f| locked.name(f).to_string())
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::tests::{bench, c17};
    use super::super::*;
    use crate::sim::{node_values, PatternSet};

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Design with `n` inputs and a single AND-chain output.
    fn chain(n: usize) -> GateGraph {
        let mut s = String::new();
        for i in 0..n {
            s += &format!("INPUT(x{i:02})\n");
        }
        s += "OUTPUT(y)\n";
        let mut prev = "x00".to_string();
        for i in 1..n {
            let name = if i == n - 1 { "y".to_string() } else { format!("g{i}") };
            s += &format!("{name} = AND({prev}, x{i:02})\n");
            prev = name;
        }
        crate::netlist::parse_bench(&s).unwrap()
    }

    #[test]
    fn strip_flips_binomial_many_patterns() {
        for n in [4, 8, 12] {
            let g = chain(n);
            for hd in [0, 1, n / 2, n] {
                let l = lock_sfll_hd(&g, &LockConfig::new(LockScheme::SfllHd, n, 3).with_hd(hd)).unwrap();
                let strip = l.graph.find("sfll_strip").unwrap();
                let p = PatternSet::exhaustive(l.graph.inputs().len() - n);
                // Key inputs are trailing and irrelevant to the strip unit; pad them.
                let mut words = p.words.clone();
                for w in &mut words {
                    w.resize(l.graph.inputs().len(), 0);
                }
                let padded = PatternSet {
                    words,
                    masks: p.masks.clone(),
                };
                let ones = node_values(&l.graph, strip, &padded).into_iter().filter(|&b| b).count();
                assert_eq!(ones, binomial(n, hd), "n={n} hd={hd}");
                verify_correct_key(&g, &l, 0, 0).unwrap();
            }
        }
    }

    #[test]
    fn c2670_key32() {
        let g = bench("c2670");
        let cfg = LockConfig::new(LockScheme::SfllHd, 32, 5);
        let l = lock_sfll_hd(&g, &cfg).unwrap();
        assert_eq!(verify_correct_key(&g, &l, 1000, 5).unwrap(), 1000);
        assert!(find_corrupting_key(&g, &l, 16, 16, 5).is_some());
        assert_eq!(protected_inputs(&l.graph, &l.key).len(), 32);
    }

    #[test]
    fn key_larger_than_inputs() {
        assert!(lock_sfll_hd(&c17(), &LockConfig::new(LockScheme::SfllHd, 6, 0)).is_err());
    }
}
