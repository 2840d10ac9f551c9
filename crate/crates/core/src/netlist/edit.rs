// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use super::{GateGraph, GateKind, GraphBuilder, NetlistError, NodeKind};

#[derive(Debug, Clone)]
pub struct EditNode {
    pub name: String,
    pub kind: NodeKind,
    pub fanins: Vec<usize>,
    pub key: bool,
    pub lock: bool,
    pub alive: bool,
}

/// Mutable, index-based working copy of a netlist used by rewrites.
///
/// Indices are stable for the lifetime of the editor; removed nodes are
/// only marked dead and dropped by [`Editor::to_graph`].
#[derive(Debug, Clone, Default)]
pub struct Editor {
    pub nodes: Vec<EditNode>,
    pub outputs: Vec<usize>,
    names: HashSet<String>,
}

impl Editor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_graph(g: &GateGraph) -> Self {
        let nodes: Vec<EditNode> = g
            .nodes()
            .iter()
            .map(|n| EditNode {
                name: n.name.clone(),
                kind: n.kind,
                fanins: n.fanins.iter().map(|f| f.index()).collect(),
                key: n.key,
                lock: n.lock,
                alive: true,
            })
            .collect();
        let names = nodes.iter().map(|n| n.name.clone()).collect();
        Self {
            nodes,
            outputs: g.outputs().iter().map(|o| o.index()).collect(),
            names,
        }
    }

    /// Returns `base` if unused, otherwise `base_1`, `base_2`, ...
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.names.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.names.contains(n))
            .unwrap()
    }

    pub fn add_input(&mut self, name: &str, key: bool) -> usize {
        let name = self.fresh_name(name);
        self.names.insert(name.clone());
        self.nodes.push(EditNode {
            name,
            kind: NodeKind::Input,
            fanins: Vec::new(),
            key,
            lock: false,
            alive: true,
        });
        self.nodes.len() - 1
    }

    pub fn add_gate(&mut self, name: &str, kind: GateKind, fanins: Vec<usize>, lock: bool) -> usize {
        let name = self.fresh_name(name);
        self.names.insert(name.clone());
        self.nodes.push(EditNode {
            name,
            kind: NodeKind::Gate(kind),
            fanins,
            key: false,
            lock,
            alive: true,
        });
        self.nodes.len() - 1
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i].name
    }

    pub fn kind(&self, i: usize) -> Option<GateKind> {
        match self.nodes[i].kind {
            NodeKind::Gate(k) => Some(k),
            NodeKind::Input => None,
        }
    }

    /// Rewires every consumer of `old` (gate fanins and primary outputs) to
    /// `new`, except the gates listed in `keep`.
    pub fn redirect(&mut self, old: usize, new: usize, keep: &[usize]) {
        for (i, n) in self.nodes.iter_mut().enumerate() {
            if !n.alive || keep.contains(&i) {
                continue;
            }
            for f in n.fanins.iter_mut() {
                if *f == old {
                    *f = new;
                }
            }
        }
        for o in self.outputs.iter_mut() {
            if *o == old {
                *o = new;
            }
        }
    }

    /// Transitive fanout of `from` (inclusive) over live nodes.
    pub fn fanout_closure(&self, from: usize) -> Vec<bool> {
        let mut fanouts = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if n.alive {
                for &f in &n.fanins {
                    fanouts[f].push(i);
                }
            }
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &w in &fanouts[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::new();
        for n in self.nodes.iter().filter(|n| n.alive) {
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
                        n.fanins.iter().map(|&f| self.nodes[f].name.clone()).collect(),
                    ));
                    if n.lock {
                        b.locks.push(n.name.clone());
                    }
                }
            }
        }
        b.outputs = self.outputs.iter().map(|&o| self.nodes[o].name.clone()).collect();
        b
    }

    /// Freezes live nodes: inputs first, then gates, each in editor order.
    pub fn to_graph(&self) -> Result<GateGraph, NetlistError> {
        self.to_builder().build()
    }
}
