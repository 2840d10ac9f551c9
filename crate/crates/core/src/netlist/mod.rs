// SPDX-License-Identifier: Apache-2.0

//! Gate-level netlist model.
//!
//! A [`GateGraph`] is an immutable DAG of nodes. Primary inputs and gates share
//! one id space: inputs come first in declaration order, followed by gates in
//! the order they were added (file order for parsed netlists). Every node
//! drives exactly one net, named after the node.

mod bench;
mod edit;
mod key;

pub use bench::{parse_bench, parse_bench_with_prefix, write_bench, DEFAULT_KEY_PREFIX};
pub use edit::Editor;
pub use key::{KeyRecord, LockScheme};

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::fmt;

use thiserror::Error;

/// Maximum fanin count accepted for multi-input gates before normalization.
pub const MAX_ARITY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Buf,
    Not,
    /// `MUX2(s, a, b)` computes `s ? a : b`. Only exists transiently inside
    /// the locking transforms.
    Mux2,
    Const0,
    Const1,
}

impl GateKind {
    pub fn from_bench(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "AND" => Self::And,
            "NAND" => Self::Nand,
            "OR" => Self::Or,
            "NOR" => Self::Nor,
            "XOR" => Self::Xor,
            "XNOR" => Self::Xnor,
            "BUF" | "BUFF" => Self::Buf,
            "NOT" | "INV" => Self::Not,
            "MUX" | "MUX2" => Self::Mux2,
            "CONST0" | "GND" => Self::Const0,
            "CONST1" | "VDD" => Self::Const1,
            _ => return None,
        })
    }

    pub fn bench_name(self) -> &'static str {
        match self {
            Self::And => "AND",
            Self::Nand => "NAND",
            Self::Or => "OR",
            Self::Nor => "NOR",
            Self::Xor => "XOR",
            Self::Xnor => "XNOR",
            Self::Buf => "BUF",
            Self::Not => "NOT",
            Self::Mux2 => "MUX2",
            Self::Const0 => "CONST0",
            Self::Const1 => "CONST1",
        }
    }

    /// Accepted fanin counts.
    pub fn arity_range(self) -> (usize, usize) {
        match self {
            Self::And | Self::Nand | Self::Or | Self::Nor | Self::Xor | Self::Xnor => {
                (1, MAX_ARITY)
            }
            Self::Buf | Self::Not => (1, 1),
            Self::Mux2 => (3, 3),
            Self::Const0 | Self::Const1 => (0, 0),
        }
    }

    pub fn is_const(self) -> bool {
        matches!(self, Self::Const0 | Self::Const1)
    }

    /// BUF and NOT: pass-through gates that never count towards cut volume.
    pub fn is_unary(self) -> bool {
        matches!(self, Self::Buf | Self::Not)
    }

    /// Output is the complement of the corresponding base operation.
    pub fn is_inverting(self) -> bool {
        matches!(self, Self::Nand | Self::Nor | Self::Xnor | Self::Not)
    }

    /// Base (non-inverting) operation of an n-ary gate.
    pub fn base(self) -> Self {
        match self {
            Self::Nand => Self::And,
            Self::Nor => Self::Or,
            Self::Xnor => Self::Xor,
            Self::Not => Self::Buf,
            k => k,
        }
    }

    /// Inverse of [`GateKind::base`].
    pub fn negated(self) -> Self {
        match self {
            Self::And => Self::Nand,
            Self::Nand => Self::And,
            Self::Or => Self::Nor,
            Self::Nor => Self::Or,
            Self::Xor => Self::Xnor,
            Self::Xnor => Self::Xor,
            Self::Buf => Self::Not,
            Self::Not => Self::Buf,
            Self::Const0 => Self::Const1,
            Self::Const1 => Self::Const0,
            Self::Mux2 => Self::Mux2,
        }
    }

    /// Member of the 2-input normalized cell library.
    pub fn is_normalized_kind(self) -> bool {
        !matches!(self, Self::Mux2 | Self::Const0 | Self::Const1)
    }

    /// Evaluates the gate over bit-parallel words.
    pub fn eval_words(self, ins: &[u64]) -> u64 {
        match self {
            Self::And => ins.iter().fold(!0, |a, &b| a & b),
            Self::Nand => !ins.iter().fold(!0, |a, &b| a & b),
            Self::Or => ins.iter().fold(0, |a, &b| a | b),
            Self::Nor => !ins.iter().fold(0, |a, &b| a | b),
            Self::Xor => ins.iter().fold(0, |a, &b| a ^ b),
            Self::Xnor => !ins.iter().fold(0, |a, &b| a ^ b),
            Self::Buf => ins[0],
            Self::Not => !ins[0],
            Self::Mux2 => (ins[0] & ins[1]) | (!ins[0] & ins[2]),
            Self::Const0 => 0,
            Self::Const1 => !0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.bench_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Input,
    Gate(GateKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    pub fanins: Vec<NodeId>,
    /// Set for primary inputs identified as key ports.
    pub key: bool,
    /// Set for gates labeled as part of the locking logic.
    pub lock: bool,
}

impl Node {
    pub fn gate_kind(&self) -> Option<GateKind> {
        match self.kind {
            NodeKind::Gate(k) => Some(k),
            NodeKind::Input => None,
        }
    }

    pub fn is_input(&self) -> bool {
        self.kind == NodeKind::Input
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("duplicate definition of `{0}`")]
    Duplicate(String),
    #[error("reference to undeclared net `{net}` in `{gate}`")]
    Undeclared { gate: String, net: String },
    #[error("unknown gate kind `{0}`")]
    UnknownKind(String),
    #[error("gate `{gate}` has {got} fanins; {kind} accepts {min}..={max}")]
    Arity {
        gate: String,
        kind: GateKind,
        got: usize,
        min: usize,
        max: usize,
    },
    #[error("combinational cycle through {0:?}")]
    Cycle(Vec<String>),
    #[error("no primary outputs")]
    NoOutputs,
    #[error("primary output `{0}` is not driven by any net")]
    DanglingOutput(String),
    #[error("key input `{0}` is not a primary input")]
    BadKey(String),
    #[error("lock label on unknown gate `{0}`")]
    BadLabel(String),
}

/// One structural invariant violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub error: NetlistError,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error.fmt(f)
    }
}

/// Name-level description of a netlist, not yet validated.
///
/// Parsing and graph rewrites populate a builder and call [`GraphBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub gates: Vec<(String, GateKind, Vec<String>)>,
    pub keys: Vec<String>,
    pub locks: Vec<String>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(&mut self, name: impl Into<String>) -> &mut Self {
        self.inputs.push(name.into());
        self
    }

    pub fn key_input(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        self.keys.push(name.clone());
        self.inputs.push(name);
        self
    }

    pub fn output(&mut self, name: impl Into<String>) -> &mut Self {
        self.outputs.push(name.into());
        self
    }

    pub fn gate<S: Into<String>>(
        &mut self,
        name: impl Into<String>,
        kind: GateKind,
        fanins: impl IntoIterator<Item = S>,
    ) -> &mut Self {
        self.gates
            .push((name.into(), kind, fanins.into_iter().map(Into::into).collect()));
        self
    }

    pub fn lock(&mut self, name: impl Into<String>) -> &mut Self {
        self.locks.push(name.into());
        self
    }

    /// Checks every structural invariant and returns one diagnostic per
    /// violation. Empty iff [`GraphBuilder::build`] would succeed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut push = |e| diags.push(Diagnostic { error: e });

        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, name) in self
            .inputs
            .iter()
            .chain(self.gates.iter().map(|g| &g.0))
            .enumerate()
        {
            if index.insert(name.as_str(), i).is_some() {
                push(NetlistError::Duplicate(name.clone()));
            }
        }
        if self.outputs.is_empty() {
            push(NetlistError::NoOutputs);
        }
        for o in &self.outputs {
            if !index.contains_key(o.as_str()) {
                push(NetlistError::DanglingOutput(o.clone()));
            }
        }
        let input_set: HashSet<&str> = self.inputs.iter().map(String::as_str).collect();
        for k in &self.keys {
            if !input_set.contains(k.as_str()) {
                push(NetlistError::BadKey(k.clone()));
            }
        }
        let gate_set: HashSet<&str> = self.gates.iter().map(|g| g.0.as_str()).collect();
        for l in &self.locks {
            if !gate_set.contains(l.as_str()) {
                push(NetlistError::BadLabel(l.clone()));
            }
        }
        let mut resolvable = true;
        for (name, kind, fanins) in &self.gates {
            let (min, max) = kind.arity_range();
            if fanins.len() < min || fanins.len() > max {
                push(NetlistError::Arity {
                    gate: name.clone(),
                    kind: *kind,
                    got: fanins.len(),
                    min,
                    max,
                });
            }
            for f in fanins {
                if !index.contains_key(f.as_str()) {
                    resolvable = false;
                    push(NetlistError::Undeclared {
                        gate: name.clone(),
                        net: f.clone(),
                    });
                }
            }
        }
        if resolvable {
            let n_in = self.inputs.len();
            let fanins: Vec<Vec<usize>> = (0..n_in)
                .map(|_| Vec::new())
                .chain(self.gates.iter().map(|(_, _, fs)| {
                    fs.iter().map(|f| index[f.as_str()]).collect()
                }))
                .collect();
            let names: Vec<&String> = self
                .inputs
                .iter()
                .chain(self.gates.iter().map(|g| &g.0))
                .collect();
            for cycle in find_cycles(&fanins) {
                push(NetlistError::Cycle(
                    cycle.into_iter().map(|i| names[i].clone()).collect(),
                ));
            }
        }
        diags
    }

    /// Validates and freezes the netlist.
    pub fn build(&self) -> Result<GateGraph, NetlistError> {
        if let Some(d) = self.validate().into_iter().next() {
            return Err(d.error);
        }
        let mut index = HashMap::new();
        let mut nodes = Vec::with_capacity(self.inputs.len() + self.gates.len());
        let keys: HashSet<&str> = self.keys.iter().map(String::as_str).collect();
        let locks: HashSet<&str> = self.locks.iter().map(String::as_str).collect();
        for name in &self.inputs {
            index.insert(name.clone(), NodeId(nodes.len() as u32));
            nodes.push(Node {
                name: name.clone(),
                kind: NodeKind::Input,
                fanins: Vec::new(),
                key: keys.contains(name.as_str()),
                lock: false,
            });
        }
        for (name, kind, _) in &self.gates {
            index.insert(name.clone(), NodeId(nodes.len() as u32));
            nodes.push(Node {
                name: name.clone(),
                kind: NodeKind::Gate(*kind),
                fanins: Vec::new(),
                key: false,
                lock: locks.contains(name.as_str()),
            });
        }
        let n_in = self.inputs.len();
        for (i, (_, _, fanins)) in self.gates.iter().enumerate() {
            nodes[n_in + i].fanins = fanins.iter().map(|f| index[f]).collect();
        }
        let outputs = self.outputs.iter().map(|o| index[o]).collect();
        Ok(GateGraph::from_nodes(nodes, outputs, index))
    }
}

/// Returns one representative cycle per non-trivial strongly connected
/// component (or self loop).
fn find_cycles(fanins: &[Vec<usize>]) -> Vec<Vec<usize>> {
    // Iterative Tarjan over fanin edges.
    let n = fanins.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut cycles = Vec::new();
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = next;
        low[start] = next;
        next += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < fanins[v].len() {
                let w = fanins[v][top.1];
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if comp.len() > 1 || fanins[v].contains(&v) {
                        comp.sort_unstable();
                        cycles.push(comp);
                    }
                }
            }
        }
    }
    cycles.sort();
    cycles
}

/// Immutable, validated gate-level netlist.
#[derive(Debug, Clone)]
pub struct GateGraph {
    nodes: Vec<Node>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
    topo: Vec<NodeId>,
    fanouts: Vec<Vec<NodeId>>,
    index: HashMap<String, NodeId>,
}

impl PartialEq for GateGraph {
    /// Structural identity: same nodes (names, kinds, fanins, flags) in the
    /// same order and the same outputs.
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.outputs == other.outputs
    }
}

impl Eq for GateGraph {}

impl GateGraph {
    fn from_nodes(nodes: Vec<Node>, outputs: Vec<NodeId>, index: HashMap<String, NodeId>) -> Self {
        let inputs = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_input())
            .map(|(i, _)| NodeId(i as u32))
            .collect();
        let mut fanouts = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            for &f in &n.fanins {
                fanouts[f.index()].push(NodeId(i as u32));
            }
        }
        let topo = topo_order(&nodes, &fanouts);
        Self {
            nodes,
            inputs,
            outputs,
            topo,
            fanouts,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// Gate nodes (everything that is not a primary input), in id order.
    pub fn gates(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids().filter(|&id| !self.node(id).is_input())
    }

    pub fn gate_count(&self) -> usize {
        self.nodes.len() - self.inputs.len()
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn key_inputs(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.inputs.iter().copied().filter(|&i| self.node(i).key)
    }

    /// Primary inputs that are not key ports.
    pub fn data_inputs(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.inputs.iter().copied().filter(|&i| !self.node(i).key)
    }

    /// Nodes in a topological order; among ready nodes the smallest id comes
    /// first, so id order is preserved whenever it is already topological.
    pub fn topo_order(&self) -> &[NodeId] {
        &self.topo
    }

    pub fn fanouts(&self, id: NodeId) -> &[NodeId] {
        &self.fanouts[id.index()]
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].name
    }

    pub fn is_lock(&self, id: NodeId) -> bool {
        self.nodes[id.index()].lock
    }

    pub fn lock_gates(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids().filter(|&id| self.is_lock(id))
    }

    /// Copy with a different lock labeling.
    pub fn with_lock_labels(&self, labeled: &HashSet<NodeId>) -> GateGraph {
        let mut g = self.clone();
        for (i, n) in g.nodes.iter_mut().enumerate() {
            n.lock = !n.is_input() && labeled.contains(&NodeId(i as u32));
        }
        g
    }

    /// Copy with the key flag set on exactly the named inputs.
    pub fn with_key_inputs<S: AsRef<str>>(&self, names: &[S]) -> Result<GateGraph, NetlistError> {
        let mut g = self.clone();
        for n in g.nodes.iter_mut() {
            n.key = false;
        }
        for name in names {
            let id = self
                .find(name.as_ref())
                .filter(|&id| self.node(id).is_input())
                .ok_or_else(|| NetlistError::BadKey(name.as_ref().to_string()))?;
            g.nodes[id.index()].key = true;
        }
        Ok(g)
    }

    /// Converts back to a name-level builder.
    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::new();
        for n in &self.nodes {
            match n.kind {
                NodeKind::Input => {
                    b.inputs.push(n.name.clone());
                    if n.key {
                        b.keys.push(n.name.clone());
                    }
                }
                NodeKind::Gate(k) => {
                    b.gates.push((
                        n.name.clone(),
                        k,
                        n.fanins.iter().map(|&f| self.name(f).to_string()).collect(),
                    ));
                    if n.lock {
                        b.locks.push(n.name.clone());
                    }
                }
            }
        }
        b.outputs = self.outputs.iter().map(|&o| self.name(o).to_string()).collect();
        b
    }

    /// Re-checks every invariant of the frozen graph.
    pub fn validate(&self) -> Vec<Diagnostic> {
        self.to_builder().validate()
    }

    /// Counts gates that are not BUF (the area measure used for overheads).
    pub fn non_buf_gate_count(&self) -> usize {
        self.gates()
            .filter(|&g| self.node(g).gate_kind() != Some(GateKind::Buf))
            .count()
    }

    /// Transitive fanin cone of `root` (root included).
    pub fn fanin_cone(&self, root: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![root];
        let mut out = Vec::new();
        seen[root.index()] = true;
        while let Some(v) = stack.pop() {
            out.push(v);
            for &f in &self.node(v).fanins {
                if !seen[f.index()] {
                    seen[f.index()] = true;
                    stack.push(f);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Marks every node in the transitive fanout of `seeds` (seeds included).
    pub fn fanout_closure(&self, seeds: impl IntoIterator<Item = NodeId>) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<NodeId> = seeds.into_iter().collect();
        for s in &stack {
            seen[s.index()] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in self.fanouts(v) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

fn topo_order(nodes: &[Node], fanouts: &[Vec<NodeId>]) -> Vec<NodeId> {
    let mut pending: Vec<usize> = nodes.iter().map(|n| n.fanins.len()).collect();
    // Duplicate fanins (AND(a, a)) are counted once per edge in both arrays.
    let mut heap: BinaryHeap<Reverse<u32>> = pending
        .iter()
        .enumerate()
        .filter(|(_, &p)| p == 0)
        .map(|(i, _)| Reverse(i as u32))
        .collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(Reverse(v)) = heap.pop() {
        order.push(NodeId(v));
        for &w in &fanouts[v as usize] {
            pending[w.index()] -= 1;
            if pending[w.index()] == 0 {
                heap.push(Reverse(w.0));
            }
        }
    }
    debug_assert_eq!(order.len(), nodes.len(), "graph must be acyclic");
    order
}

/// Validates a name-level netlist, see [`GraphBuilder::validate`].
pub fn validate(b: &GraphBuilder) -> Vec<Diagnostic> {
    b.validate()
}
