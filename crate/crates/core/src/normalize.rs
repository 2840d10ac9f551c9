// SPDX-License-Identifier: Apache-2.0

//! Deterministic normalization onto the 2-input cell library
//! {AND, NAND, OR, NOR, XOR, XNOR, BUF, NOT}.
//!
//! The pass pipeline is: [`decompose_to_2input`], then [`fold_constants`] and
//! [`strash`] repeated until the graph stops changing. Every pass preserves the
//! function of each primary output (outputs are compared positionally; the
//! net driving an output may be renamed when buffers are absorbed).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::netlist::{Editor, GateGraph, GateKind, GraphBuilder, NetlistError, NodeKind, MAX_ARITY};

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("gate `{0}` has {1} fanins (limit {MAX_ARITY})")]
    Arity(String, usize),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeReport {
    pub gates_before: usize,
    pub gates_after: usize,
    pub constants_folded: usize,
    pub strash_merges: usize,
}

/// Rewrites every gate into 2-input (or 1-input) cells.
///
/// Wide gates become left-leaning chains of the base operation with the
/// inversion, if any, on the last stage: `NAND(a,b,c)` becomes
/// `NAND(AND(a,b), c)`. `MUX2(s,a,b)` becomes `OR(AND(s,a), AND(NOT(s),b))`.
/// Fragments inherit the lock label of the gate they came from; the last
/// stage keeps the original gate name.
pub fn decompose_to_2input(g: &GateGraph) -> Result<GateGraph, NormalizeError> {
    let mut used: HashSet<String> = g.nodes().iter().map(|n| n.name.clone()).collect();
    let mut fresh = |base: String| -> String {
        let mut name = base.clone();
        let mut i = 1;
        while used.contains(&name) {
            name = format!("{base}_{i}");
            i += 1;
        }
        used.insert(name.clone());
        name
    };
    let mut b = GraphBuilder::new();
    for n in g.nodes() {
        let NodeKind::Gate(kind) = n.kind else {
            b.inputs.push(n.name.clone());
            if n.key {
                b.keys.push(n.name.clone());
            }
            continue;
        };
        let fanins: Vec<String> = n.fanins.iter().map(|&f| g.name(f).to_string()).collect();
        if fanins.len() > MAX_ARITY {
            return Err(NormalizeError::Arity(n.name.clone(), fanins.len()));
        }
        let emit = |b: &mut GraphBuilder, name: String, k: GateKind, ins: Vec<String>| {
            if n.lock {
                b.locks.push(name.clone());
            }
            b.gates.push((name, k, ins));
        };
        match kind {
            GateKind::Mux2 => {
                let (s, a, x) = (&fanins[0], &fanins[1], &fanins[2]);
                let ns = fresh(format!("{}_ns", n.name));
                let t = fresh(format!("{}_t", n.name));
                let f = fresh(format!("{}_f", n.name));
                emit(&mut b, ns.clone(), GateKind::Not, vec![s.clone()]);
                emit(&mut b, t.clone(), GateKind::And, vec![s.clone(), a.clone()]);
                emit(&mut b, f.clone(), GateKind::And, vec![ns, x.clone()]);
                emit(&mut b, n.name.clone(), GateKind::Or, vec![t, f]);
            }
            k if fanins.len() == 1 && !k.is_unary() => {
                let unary = if k.is_inverting() { GateKind::Not } else { GateKind::Buf };
                emit(&mut b, n.name.clone(), unary, fanins);
            }
            k if fanins.len() > 2 => {
                let base = k.base();
                let mut acc = fanins[0].clone();
                for (i, f) in fanins[1..fanins.len() - 1].iter().enumerate() {
                    let t = fresh(format!("{}_d{}", n.name, i + 1));
                    emit(&mut b, t.clone(), base, vec![acc, f.clone()]);
                    acc = t;
                }
                emit(&mut b, n.name.clone(), k, vec![acc, fanins[fanins.len() - 1].clone()]);
            }
            k => emit(&mut b, n.name.clone(), k, fanins),
        }
    }
    b.outputs = g.outputs().iter().map(|&o| g.name(o).to_string()).collect();
    Ok(b.build()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sig {
    Const(bool),
    Node(usize),
}

/// Result of a 2-input operation with one constant operand.
enum Simplified {
    Const(bool),
    Pass,
    Invert,
}

fn simplify_with_const(kind: GateKind, c: bool) -> Simplified {
    use GateKind::*;
    use Simplified::*;
    match (kind, c) {
        (And, false) => Const(false),
        (And, true) => Pass,
        (Nand, false) => Const(true),
        (Nand, true) => Invert,
        (Or, true) => Const(true),
        (Or, false) => Pass,
        (Nor, true) => Const(false),
        (Nor, false) => Invert,
        (Xor, false) | (Xnor, true) => Pass,
        (Xor, true) | (Xnor, false) => Invert,
        _ => unreachable!("not a 2-input operation: {kind}"),
    }
}

struct Folder {
    ed: Editor,
}

impl Folder {
    /// `NOT(x)`, cancelling against an existing inverter on `x`.
    fn invert(&mut self, x: usize, name: &str, lock: bool) -> Sig {
        if self.ed.kind(x) == Some(GateKind::Not) {
            return Sig::Node(self.ed.nodes[x].fanins[0]);
        }
        Sig::Node(self.ed.add_gate(name, GateKind::Not, vec![x], lock))
    }
}

/// Propagates constants, cancels double inversions and absorbs buffers.
///
/// A buffer survives only where a primary output is driven directly by a
/// primary input; a constant gate survives only where it drives a primary
/// output. Gates left without a path to an output are removed.
pub fn fold_constants(g: &GateGraph) -> GateGraph {
    fold_constants_counted(g).0
}

fn fold_constants_counted(g: &GateGraph) -> (GateGraph, usize) {
    let mut f = Folder { ed: Editor::new() };
    let mut map: Vec<Option<Sig>> = vec![None; g.len()];
    for &i in g.inputs() {
        let n = g.node(i);
        map[i.index()] = Some(Sig::Node(f.ed.add_input(&n.name, n.key)));
    }
    let mut folded = 0;
    for &id in g.topo_order() {
        let n = g.node(id);
        let NodeKind::Gate(kind) = n.kind else { continue };
        let ins: SmallVec<[Sig; 4]> = n.fanins.iter().map(|f| map[f.index()].unwrap()).collect();
        let has_const = ins.iter().any(|s| matches!(s, Sig::Const(_)));
        let sig = match kind {
            GateKind::Const0 => Sig::Const(false),
            GateKind::Const1 => Sig::Const(true),
            GateKind::Buf => ins[0],
            GateKind::Not => match ins[0] {
                Sig::Const(b) => Sig::Const(!b),
                Sig::Node(x) => {
                    if f.ed.kind(x) == Some(GateKind::Not) {
                        folded += 1;
                    }
                    f.invert(x, &n.name, n.lock)
                }
            },
            k if ins.len() == 2 && has_const => {
                folded += 1;
                match (ins[0], ins[1]) {
                    (Sig::Const(a), Sig::Const(b)) => {
                        let w = k.eval_words(&[if a { !0 } else { 0 }, if b { !0 } else { 0 }]);
                        Sig::Const(w & 1 == 1)
                    }
                    (Sig::Const(c), Sig::Node(x)) | (Sig::Node(x), Sig::Const(c)) => {
                        match simplify_with_const(k, c) {
                            Simplified::Const(v) => Sig::Const(v),
                            Simplified::Pass => Sig::Node(x),
                            Simplified::Invert => f.invert(x, &n.name, n.lock),
                        }
                    }
                    _ => unreachable!(),
                }
            }
            k => {
                // Wide or MUX gates with constant fanins are left as they are.
                let fanins = ins
                    .iter()
                    .map(|s| match *s {
                        Sig::Node(x) => x,
                        Sig::Const(b) => {
                            let kind = if b { GateKind::Const1 } else { GateKind::Const0 };
                            f.ed.add_gate(&format!("{}_c", n.name), kind, vec![], false)
                        }
                    })
                    .collect();
                Sig::Node(f.ed.add_gate(&n.name, k, fanins, n.lock))
            }
        };
        map[id.index()] = Some(sig);
    }
    let mut outputs = Vec::with_capacity(g.outputs().len());
    for &o in g.outputs() {
        let name = g.name(o);
        let out = match map[o.index()].unwrap() {
            Sig::Const(b) => {
                let kind = if b { GateKind::Const1 } else { GateKind::Const0 };
                f.ed.add_gate(name, kind, vec![], false)
            }
            Sig::Node(x) if f.ed.kind(x).is_none() => {
                f.ed.add_gate(name, GateKind::Buf, vec![x], false)
            }
            Sig::Node(x) => x,
        };
        outputs.push(out);
    }
    f.ed.outputs = outputs;
    sweep(&mut f.ed);
    (f.ed.to_graph().expect("folding preserves validity"), folded)
}

/// Marks gates with no path to a primary output as dead.
fn sweep(ed: &mut Editor) {
    let mut live = vec![false; ed.nodes.len()];
    let mut stack: Vec<usize> = ed.outputs.clone();
    while let Some(v) = stack.pop() {
        if live[v] {
            continue;
        }
        live[v] = true;
        stack.extend(ed.nodes[v].fanins.iter().copied());
    }
    for (i, n) in ed.nodes.iter_mut().enumerate() {
        if n.kind != NodeKind::Input {
            n.alive = live[i];
        }
    }
}

/// Structural hashing: merges gates with the same kind and the same fanins
/// (order-insensitive; every library cell is commutative). The first gate in
/// topological order survives and keeps its name; a merged gate carries the
/// lock label if either original did.
pub fn strash(g: &GateGraph) -> (GateGraph, NormalizeReport) {
    let mut ed = Editor::new();
    let mut map = vec![usize::MAX; g.len()];
    let mut table: HashMap<(GateKind, SmallVec<[usize; 2]>), usize> = HashMap::new();
    let mut merges = 0;
    for &i in g.inputs() {
        let n = g.node(i);
        map[i.index()] = ed.add_input(&n.name, n.key);
    }
    for &id in g.topo_order() {
        let n = g.node(id);
        let NodeKind::Gate(kind) = n.kind else { continue };
        let mut fanins: SmallVec<[usize; 2]> = n.fanins.iter().map(|f| map[f.index()]).collect();
        let ordered = fanins.clone();
        if kind != GateKind::Mux2 {
            fanins.sort_unstable();
        }
        match table.get(&(kind, fanins.clone())) {
            Some(&existing) => {
                merges += 1;
                ed.nodes[existing].lock |= n.lock;
                map[id.index()] = existing;
            }
            None => {
                let new = ed.add_gate(&n.name, kind, ordered.to_vec(), n.lock);
                table.insert((kind, fanins), new);
                map[id.index()] = new;
            }
        }
    }
    ed.outputs = g.outputs().iter().map(|o| map[o.index()]).collect();
    sweep(&mut ed);
    let out = ed.to_graph().expect("strash preserves validity");
    let report = NormalizeReport {
        gates_before: g.gate_count(),
        gates_after: out.gate_count(),
        constants_folded: 0,
        strash_merges: merges,
    };
    (out, report)
}

/// Full normalization: decomposition, then constant folding and structural
/// hashing until a fixpoint. Lock labels and key flags are carried through.
pub fn normalize(g: &GateGraph) -> Result<(GateGraph, NormalizeReport), NormalizeError> {
    let mut report = NormalizeReport {
        gates_before: g.gate_count(),
        ..Default::default()
    };
    let mut cur = decompose_to_2input(g)?;
    // Each round strictly shrinks or leaves the graph unchanged; the bound
    // is never reached in practice.
    for _ in 0..64 {
        let (folded, n_folded) = fold_constants_counted(&cur);
        let (hashed, r) = strash(&folded);
        report.constants_folded += n_folded;
        report.strash_merges += r.strash_merges;
        let done = hashed == cur;
        cur = hashed;
        if done {
            break;
        }
    }
    report.gates_after = cur.gate_count();
    Ok((cur, report))
}

/// Parses, normalizes and returns the graph; convenience for callers that
/// start from bench text.
pub fn normalize_bench(text: &str) -> Result<GateGraph, NormalizeError> {
    let g = crate::netlist::parse_bench(text)?;
    Ok(normalize(&g)?.0)
}
