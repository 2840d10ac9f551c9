// SPDX-License-Identifier: Apache-2.0

//! Locked test-article generators: TRLL-style XOR/XNOR key gates, MUX
//! locking, 2-input LUT locking and SFLL-HD.
//!
//! Every generator takes a normalized graph, returns the locked graph (key
//! inputs named `keyinput{i}`, no lock labels) and a [`KeyRecord`] holding
//! the correct key and the names of every gate it added or altered.

mod lut;
mod mux;
mod sfll;
mod trll;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::Editor;
use crate::netlist::{GateGraph, GateKind, KeyRecord, LockScheme, NetlistError};
use crate::sim::{check_equivalence, PatternSet, SimError};

pub use lut::lock_lut;
pub use mux::{lock_mux, MUX_RETRIES};
pub use sfll::{lock_sfll_hd, protected_inputs};
pub use trll::{lock_trll, lock_trll_at};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LockError {
    #[error("invalid lock configuration: {0}")]
    Config(String),
    #[error("{scheme} needs {needed} sites but only {available} are available")]
    TooFewSites {
        scheme: LockScheme,
        needed: usize,
        available: usize,
    },
    #[error("no acyclic decoy wire for MUX site `{0}`")]
    NoDecoy(String),
    #[error("original design has no gates")]
    EmptyDesign,
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LockConfig {
    pub scheme: LockScheme,
    pub key_size: usize,
    /// SFLL-HD Hamming distance; `None` means `key_size / 2`.
    pub hd: Option<usize>,
    pub lut_k: usize,
    pub seed: u64,
}

impl LockConfig {
    pub fn new(scheme: LockScheme, key_size: usize, seed: u64) -> Self {
        Self {
            scheme,
            key_size,
            hd: None,
            lut_k: 2,
            seed,
        }
    }

    pub fn with_hd(mut self, hd: usize) -> Self {
        self.hd = Some(hd);
        self
    }

    pub fn hd(&self) -> usize {
        self.hd.unwrap_or(self.key_size / 2)
    }

    /// Checks the invariants that do not depend on the target design.
    pub fn check(&self) -> Result<(), LockError> {
        if self.key_size == 0 {
            return Err(LockError::Config("key size must be positive".into()));
        }
        if self.hd() > self.key_size {
            return Err(LockError::Config(format!(
                "hd {} exceeds key size {}",
                self.hd(),
                self.key_size
            )));
        }
        if self.lut_k != 2 {
            return Err(LockError::Config(format!("only 2-input LUTs are supported, got {}", self.lut_k)));
        }
        if self.scheme == LockScheme::Lut && !self.key_size.is_multiple_of(4) {
            return Err(LockError::Config(format!(
                "LUT key size {} is not a multiple of 4",
                self.key_size
            )));
        }
        Ok(())
    }

    fn expect(&self, scheme: LockScheme) -> Result<(), LockError> {
        if self.scheme != scheme {
            return Err(LockError::Config(format!(
                "configuration is for {}, not {scheme}",
                self.scheme
            )));
        }
        self.check()
    }
}

/// A locked graph with its key and ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LockedDesign {
    pub graph: GateGraph,
    pub key: KeyRecord,
}

/// Dispatches on `cfg.scheme`.
pub fn lock(g: &GateGraph, cfg: &LockConfig) -> Result<LockedDesign, LockError> {
    match cfg.scheme {
        LockScheme::Trll => lock_trll(g, cfg),
        LockScheme::Mux => lock_mux(g, cfg),
        LockScheme::Lut => lock_lut(g, cfg),
        LockScheme::SfllHd => lock_sfll_hd(g, cfg),
    }
}

/// Editing context shared by the generators: tracks key inputs and the
/// ground-truth gate list.
struct LockCtx {
    ed: Editor,
    rng: ChaCha8Rng,
    keys: Vec<usize>,
    bits: Vec<bool>,
    truth: Vec<usize>,
    /// Node count of the original design; indices below it are original.
    n_orig: usize,
}

impl LockCtx {
    fn new(g: &GateGraph, seed: u64) -> Self {
        let ed = Editor::from_graph(g);
        Self {
            n_orig: ed.nodes.len(),
            ed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            keys: Vec::new(),
            bits: Vec::new(),
            truth: Vec::new(),
        }
    }

    fn key_input(&mut self, bit: bool) -> usize {
        let name = format!("keyinput{}", self.keys.len());
        let k = self.ed.add_input(&name, true);
        self.keys.push(k);
        self.bits.push(bit);
        k
    }

    fn gate(&mut self, name: &str, kind: GateKind, fanins: Vec<usize>) -> usize {
        let i = self.ed.add_gate(name, kind, fanins, false);
        self.truth.push(i);
        i
    }

    /// Original gates other than constants, in id order.
    fn original_gates(&self) -> Vec<usize> {
        (0..self.n_orig)
            .filter(|&i| matches!(self.ed.kind(i), Some(k) if !k.is_const()))
            .collect()
    }

    /// `s ? a : b` as OR(AND(s, a), AND(NOT s, b)); the OR is returned.
    fn mux2(&mut self, base: &str, s: usize, a: usize, b: usize) -> usize {
        let ns = self.gate(&format!("{base}_ns"), GateKind::Not, vec![s]);
        let t = self.gate(&format!("{base}_t"), GateKind::And, vec![s, a]);
        let f = self.gate(&format!("{base}_f"), GateKind::And, vec![ns, b]);
        self.gate(base, GateKind::Or, vec![t, f])
    }

    fn finish(mut self, scheme: LockScheme) -> Result<LockedDesign, LockError> {
        self.truth.sort_unstable();
        self.truth.dedup();
        let graph = self.ed.to_graph()?;
        let key = KeyRecord {
            scheme,
            key_input_names: self.keys.iter().map(|&k| self.ed.name(k).to_string()).collect(),
            key_bits: self.bits,
            ground_truth_lock_gates: self.truth.iter().map(|&t| self.ed.name(t).to_string()).collect(),
        };
        Ok(LockedDesign { graph, key })
    }
}

fn shuffled<T: Clone>(items: &[T], rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}

/// Gate-count overhead of one locked artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub design: String,
    pub scheme: LockScheme,
    pub key_size: usize,
    pub area_ratio: f64,
}

impl OverheadReport {
    pub fn measure(
        design: &str,
        scheme: LockScheme,
        key_size: usize,
        original: &GateGraph,
        locked: &GateGraph,
    ) -> Result<Self, LockError> {
        Ok(Self {
            design: design.to_string(),
            scheme,
            key_size,
            area_ratio: overhead(original, locked)?,
        })
    }
}

/// Non-BUF gate count of `locked` over that of `original`.
pub fn overhead(original: &GateGraph, locked: &GateGraph) -> Result<f64, LockError> {
    let base = original.non_buf_gate_count();
    if base == 0 {
        return Err(LockError::EmptyDesign);
    }
    Ok(locked.non_buf_gate_count() as f64 / base as f64)
}

/// Checks that the locked design matches the original under the correct
/// key: exhaustively for at most 16 data inputs, else on `random_count`
/// seeded vectors. Returns the number of vectors checked.
pub fn verify_correct_key(
    original: &GateGraph,
    locked: &LockedDesign,
    random_count: usize,
    seed: u64,
) -> Result<usize, SimError> {
    let p = PatternSet::for_inputs(original.inputs().len(), random_count, seed);
    check_equivalence(original, &locked.graph, &locked.key.assignment(), &p)
}

/// Searches for a wrong key that corrupts some output. Tries the all-flipped
/// key and then seeded random keys, each against random vectors; for
/// SFLL-HD the vectors are drawn at distance `hd` from the correct key on
/// the protected inputs, where corruption can actually be observed.
/// Returns the first corrupting key found.
pub fn find_corrupting_key(
    original: &GateGraph,
    locked: &LockedDesign,
    hd: usize,
    tries: usize,
    seed: u64,
) -> Option<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let correct = &locked.key.key_bits;
    let n = original.inputs().len();
    let patterns = if locked.key.scheme == LockScheme::SfllHd {
        let prot = protected_inputs(&locked.graph, &locked.key);
        let pos: Vec<usize> = prot
            .iter()
            .map(|name| {
                original
                    .inputs()
                    .iter()
                    .position(|&i| original.name(i) == name)
                    .expect("protected input exists in the original")
            })
            .collect();
        let mut p = PatternSet::random(n, 1024, rng.gen());
        for (w, mask) in p.words.iter_mut().zip(p.masks.clone()) {
            for bit in 0..64 {
                if (mask >> bit) & 1 == 0 {
                    continue;
                }
                let flips: Vec<usize> = rand::seq::index::sample(&mut rng, pos.len(), hd).into_vec();
                for (j, &pi) in pos.iter().enumerate() {
                    let v = correct[j] ^ flips.contains(&j);
                    w[pi] = (w[pi] & !(1 << bit)) | ((v as u64) << bit);
                }
            }
        }
        p
    } else {
        PatternSet::for_inputs(n, 1000, rng.gen())
    };
    let mut candidates = vec![correct.iter().map(|b| !b).collect::<Vec<bool>>()];
    for _ in 0..tries {
        let k: Vec<bool> = (0..correct.len()).map(|_| rng.gen()).collect();
        if &k != correct {
            candidates.push(k);
        }
    }
    candidates.into_iter().find(|k| {
        let fixed: Vec<(String, bool)> = locked
            .key
            .key_input_names
            .iter()
            .cloned()
            .zip(k.iter().copied())
            .collect();
        matches!(
            check_equivalence(original, &locked.graph, &fixed, &patterns),
            Err(SimError::Mismatch { .. })
        )
    })
}
