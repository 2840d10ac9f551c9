// SPDX-License-Identifier: Apache-2.0

//! Bit-parallel logic simulation and simulation-based equivalence checks.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::netlist::{GateGraph, NodeId, NodeKind};

/// Largest input count simulated exhaustively by [`check_equivalence`].
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// Projection patterns for the low six variables of a 64-row block.
pub const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Simulates one 64-pattern word. `input_words[i]` drives `g.inputs()[i]`.
/// Returns the value of every node, indexed by node id.
pub fn simulate_word(g: &GateGraph, input_words: &[u64]) -> Vec<u64> {
    let mut values = vec![0u64; g.len()];
    simulate_into(g, input_words, &mut values);
    values
}

pub fn simulate_into(g: &GateGraph, input_words: &[u64], values: &mut [u64]) {
    assert_eq!(input_words.len(), g.inputs().len());
    for (&id, &w) in g.inputs().iter().zip(input_words) {
        values[id.index()] = w;
    }
    let mut ins = Vec::with_capacity(16);
    for &id in g.topo_order() {
        let n = g.node(id);
        if let NodeKind::Gate(k) = n.kind {
            ins.clear();
            ins.extend(n.fanins.iter().map(|f| values[f.index()]));
            values[id.index()] = k.eval_words(&ins);
        }
    }
}

/// Evaluates the primary outputs for a single input assignment given by name.
pub fn eval(g: &GateGraph, assignment: &HashMap<String, bool>) -> Vec<bool> {
    let words: Vec<u64> = g
        .inputs()
        .iter()
        .map(|&i| if assignment.get(g.name(i)).copied().unwrap_or(false) { !0 } else { 0 })
        .collect();
    let values = simulate_word(g, &words);
    g.outputs().iter().map(|o| values[o.index()] & 1 == 1).collect()
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("output count differs: {0} vs {1}")]
    OutputCount(usize, usize),
    #[error("input `{0}` of the candidate is neither a reference input nor fixed")]
    UnboundInput(String),
    #[error("output #{output} differs for input vector {vector}")]
    Mismatch { output: usize, vector: String },
}

/// Input patterns for a simulation run over `n` free variables.
#[derive(Debug, Clone)]
pub struct PatternSet {
    /// `words[w][i]`: word `w` of variable `i`.
    pub words: Vec<Vec<u64>>,
    /// Valid-pattern mask per word.
    pub masks: Vec<u64>,
}

impl PatternSet {
    /// All `2^n` assignments (n ≤ 16); variable 0 is the least significant.
    pub fn exhaustive(n: usize) -> Self {
        assert!(n <= EXHAUSTIVE_LIMIT);
        let total = 1usize << n;
        let n_words = total.div_ceil(64);
        let last_mask = if total >= 64 { !0 } else { (1u64 << total) - 1 };
        let words = (0..n_words)
            .map(|w| {
                (0..n)
                    .map(|i| {
                        if i < 6 {
                            VAR_MASKS[i]
                        } else if (w >> (i - 6)) & 1 == 1 {
                            !0
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let mut masks = vec![!0u64; n_words];
        masks[n_words - 1] = last_mask;
        Self { words, masks }
    }

    pub fn random(n: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_words = count.div_ceil(64).max(1);
        let words = (0..n_words).map(|_| (0..n).map(|_| rng.gen()).collect()).collect();
        let mut masks = vec![!0u64; n_words];
        let rem = count % 64;
        if rem != 0 {
            masks[n_words - 1] = (1u64 << rem) - 1;
        }
        Self { words, masks }
    }

    /// Exhaustive when `n ≤ 16`, otherwise `random_count` seeded vectors.
    pub fn for_inputs(n: usize, random_count: usize, seed: u64) -> Self {
        if n <= EXHAUSTIVE_LIMIT {
            Self::exhaustive(n)
        } else {
            Self::random(n, random_count, seed)
        }
    }

    pub fn count(&self) -> usize {
        self.masks.iter().map(|m| m.count_ones() as usize).sum()
    }
}

/// Compares `candidate` against `reference` output by output (positionally).
///
/// Candidate inputs are matched to reference inputs by name; any extra
/// candidate input must be given a constant value in `fixed` (key inputs).
/// Returns the number of patterns checked.
pub fn check_equivalence(
    reference: &GateGraph,
    candidate: &GateGraph,
    fixed: &[(String, bool)],
    patterns: &PatternSet,
) -> Result<usize, SimError> {
    if reference.outputs().len() != candidate.outputs().len() {
        return Err(SimError::OutputCount(
            reference.outputs().len(),
            candidate.outputs().len(),
        ));
    }
    let ref_pos: HashMap<&str, usize> = reference
        .inputs()
        .iter()
        .enumerate()
        .map(|(i, &id)| (reference.name(id), i))
        .collect();
    let fixed: HashMap<&str, bool> = fixed.iter().map(|(n, b)| (n.as_str(), *b)).collect();
    enum Src {
        Var(usize),
        Const(bool),
    }
    let cand_src: Vec<Src> = candidate
        .inputs()
        .iter()
        .map(|&id| {
            let name = candidate.name(id);
            if let Some(&b) = fixed.get(name) {
                Ok(Src::Const(b))
            } else if let Some(&p) = ref_pos.get(name) {
                Ok(Src::Var(p))
            } else {
                Err(SimError::UnboundInput(name.to_string()))
            }
        })
        .collect::<Result<_, _>>()?;

    let mut rv = vec![0u64; reference.len()];
    let mut cv = vec![0u64; candidate.len()];
    for (words, &mask) in patterns.words.iter().zip(&patterns.masks) {
        simulate_into(reference, words, &mut rv);
        let cw: Vec<u64> = cand_src
            .iter()
            .map(|s| match *s {
                Src::Var(p) => words[p],
                Src::Const(b) => {
                    if b {
                        !0
                    } else {
                        0
                    }
                }
            })
            .collect();
        simulate_into(candidate, &cw, &mut cv);
        for (o, (&ro, &co)) in reference.outputs().iter().zip(candidate.outputs()).enumerate() {
            let diff = (rv[ro.index()] ^ cv[co.index()]) & mask;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                let vector = words
                    .iter()
                    .map(|w| if (w >> bit) & 1 == 1 { '1' } else { '0' })
                    .collect();
                return Err(SimError::Mismatch { output: o, vector });
            }
        }
    }
    Ok(patterns.count())
}

/// Convenience wrapper: exhaustive for ≤ 16 inputs, else `random_count`
/// seeded random vectors.
pub fn equivalent_under_key(
    reference: &GateGraph,
    candidate: &GateGraph,
    fixed: &[(String, bool)],
    random_count: usize,
    seed: u64,
) -> Result<usize, SimError> {
    let patterns = PatternSet::for_inputs(reference.inputs().len(), random_count, seed);
    check_equivalence(reference, candidate, fixed, &patterns)
}

/// Value of `node` for each of the patterns (one bool per pattern).
pub fn node_values(g: &GateGraph, node: NodeId, patterns: &PatternSet) -> Vec<bool> {
    let mut out = Vec::new();
    let mut values = vec![0u64; g.len()];
    for (words, &mask) in patterns.words.iter().zip(&patterns.masks) {
        simulate_into(g, words, &mut values);
        let v = values[node.index()];
        for b in 0..64 {
            if (mask >> b) & 1 == 1 {
                out.push((v >> b) & 1 == 1);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    #[test]
    fn exhaustive_pattern_counts() {
        assert_eq!(PatternSet::exhaustive(3).count(), 8);
        assert_eq!(PatternSet::exhaustive(10).count(), 1024);
        assert_eq!(PatternSet::random(40, 1000, 1).count(), 1000);
    }

    #[test]
    fn c17_truth() {
        let g = parse_bench(include_str!("../data/iscas85/c17.bench")).unwrap();
        let mut a = HashMap::new();
        for n in ["1", "2", "3", "6", "7"] {
            a.insert(n.to_string(), false);
        }
        // all-zero inputs: 10=11=1, 16=19=1, 22=23=0
        assert_eq!(eval(&g, &a), vec![false, false]);
    }

    #[test]
    fn detects_difference() {
        let a = parse_bench("INPUT(x)\nINPUT(y)\nOUTPUT(z)\nz = AND(x, y)\n").unwrap();
        let b = parse_bench("INPUT(x)\nINPUT(y)\nOUTPUT(z)\nz = OR(x, y)\n").unwrap();
        let p = PatternSet::exhaustive(2);
        assert!(check_equivalence(&a, &a, &[], &p).is_ok());
        assert!(matches!(
            check_equivalence(&a, &b, &[], &p),
            Err(SimError::Mismatch { output: 0, .. })
        ));
    }
}
