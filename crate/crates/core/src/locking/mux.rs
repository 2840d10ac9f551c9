// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::{LockConfig, LockCtx, LockError, LockedDesign};
use crate::netlist::{GateGraph, LockScheme};

/// Decoy draws per MUX site before giving up.
pub const MUX_RETRIES: usize = 64;

/// MUX locking: each key bit selects between the true wire `t` and a decoy
/// `d` outside the fanout of `t`. The MUX is built from NOT/AND/OR gates, all
/// of which are ground truth.
pub fn lock_mux(g: &GateGraph, cfg: &LockConfig) -> Result<LockedDesign, LockError> {
    cfg.expect(LockScheme::Mux)?;
    let mut cx = LockCtx::new(g, cfg.seed);
    let gates = cx.original_gates();
    if gates.len() < cfg.key_size {
        return Err(LockError::TooFewSites {
            scheme: LockScheme::Mux,
            needed: cfg.key_size,
            available: gates.len(),
        });
    }
    // Decoys: original primary inputs and gates.
    let decoys: Vec<usize> = (0..cx.n_orig)
        .filter(|&i| !cx.ed.kind(i).is_some_and(|k| k.is_const()))
        .collect();
    let mut sites = super::shuffled(&gates, &mut cx.rng);
    sites.truncate(cfg.key_size);
    for (i, &t) in sites.iter().enumerate() {
        let fanout = cx.ed.fanout_closure(t);
        let d = (0..MUX_RETRIES)
            .map(|_| decoys[cx.rng.gen_range(0..decoys.len())])
            .find(|&d| !fanout[d])
            .ok_or_else(|| LockError::NoDecoy(cx.ed.name(t).to_string()))?;
        let bit: bool = cx.rng.gen();
        let key = cx.key_input(bit);
        let (a, b) = if bit { (t, d) } else { (d, t) };
        let out = cx.mux2(&format!("mux_{i}"), key, a, b);
        let frags: Vec<usize> = cx.truth[cx.truth.len() - 4..].to_vec();
        cx.ed.redirect(t, out, &frags);
    }
    cx.finish(LockScheme::Mux)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{bench, c17};
    use super::super::*;
    use crate::sim::PatternSet;

    #[test]
    fn c17_exhaustive() {
        let g = c17();
        for seed in 0..20 {
            let l = lock_mux(&g, &LockConfig::new(LockScheme::Mux, 2, seed)).unwrap();
            assert_eq!(l.key.ground_truth_lock_gates.len(), 8);
            let p = PatternSet::exhaustive(5);
            assert_eq!(check_equivalence(&g, &l.graph, &l.key.assignment(), &p).unwrap(), 32);
        }
    }

    #[test]
    fn acyclic_over_seeds() {
        let g = bench("c1355");
        for seed in 0..100 {
            let l = lock_mux(&g, &LockConfig::new(LockScheme::Mux, 32, seed)).unwrap();
            assert!(l.graph.validate().is_empty());
        }
    }
}
