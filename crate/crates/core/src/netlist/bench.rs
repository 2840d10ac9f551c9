// SPDX-License-Identifier: Apache-2.0

//! ISCAS-style `.bench` reader and writer.
//!
//! ```text
//! # comment
//! INPUT(a)
//! OUTPUT(y)
//! y = NAND(a, b)
//! ```
//!
//! Lock labels travel as `# LOCKGATE <name>` comment lines.

use std::fmt::Write as _;

use super::{GateGraph, GateKind, GraphBuilder, NetlistError};

pub const DEFAULT_KEY_PREFIX: &str = "keyinput";

const LOCK_TAG: &str = "LOCKGATE";

/// Parses bench text, flagging inputs named `keyinput*` as key ports.
pub fn parse_bench(text: &str) -> Result<GateGraph, NetlistError> {
    parse_bench_with_prefix(text, DEFAULT_KEY_PREFIX)
}

pub fn parse_bench_with_prefix(text: &str, key_prefix: &str) -> Result<GateGraph, NetlistError> {
    parse_builder(text, key_prefix)?.build()
}

pub(crate) fn parse_builder(text: &str, key_prefix: &str) -> Result<GraphBuilder, NetlistError> {
    let mut b = GraphBuilder::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let syntax = |msg: &str| NetlistError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let (body, comment) = match raw.find('#') {
            Some(i) => (&raw[..i], Some(&raw[i + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let mut words = c.split_whitespace();
            if words.next() == Some(LOCK_TAG) {
                let name = words.next().ok_or_else(|| syntax("LOCKGATE without a name"))?;
                b.lock(name);
            }
        }
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = body.split_once('=') {
            let name = lhs.trim();
            if name.is_empty() {
                return Err(syntax("missing gate name"));
            }
            let (kind, args) = call(rhs.trim()).ok_or_else(|| syntax("expected KIND(args)"))?;
            let kind =
                GateKind::from_bench(kind).ok_or_else(|| NetlistError::UnknownKind(kind.into()))?;
            b.gate(name, kind, args);
        } else {
            let (decl, args) = call(body).ok_or_else(|| syntax("expected INPUT(..) or OUTPUT(..)"))?;
            let [net] = args.as_slice() else {
                return Err(syntax("declaration takes exactly one net"));
            };
            match decl.to_ascii_uppercase().as_str() {
                "INPUT" => {
                    if net.starts_with(key_prefix) {
                        b.key_input(*net);
                    } else {
                        b.input(*net);
                    }
                }
                "OUTPUT" => {
                    b.output(*net);
                }
                other => return Err(syntax(&format!("unknown declaration `{other}`"))),
            }
        }
    }
    Ok(b)
}

/// Splits `NAME(a, b, c)` into the name and its trimmed argument list.
fn call(s: &str) -> Option<(&str, Vec<&str>)> {
    let open = s.find('(')?;
    let inner = s[open + 1..].strip_suffix(')')?;
    let name = s[..open].trim();
    if name.is_empty() {
        return None;
    }
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    if args.iter().any(|a| a.is_empty()) {
        return None;
    }
    Some((name, args))
}

/// Serializes a graph: lock labels, inputs, outputs, then gates by id.
pub fn write_bench(g: &GateGraph) -> String {
    let mut out = String::new();
    let labels: Vec<_> = g.lock_gates().collect();
    for &id in &labels {
        let _ = writeln!(out, "# {LOCK_TAG} {}", g.name(id));
    }
    if !labels.is_empty() {
        out.push('\n');
    }
    for &i in g.inputs() {
        let _ = writeln!(out, "INPUT({})", g.name(i));
    }
    out.push('\n');
    for &o in g.outputs() {
        let _ = writeln!(out, "OUTPUT({})", g.name(o));
    }
    out.push('\n');
    for id in g.gates() {
        let n = g.node(id);
        let kind = n.gate_kind().expect("gate");
        let args: Vec<&str> = n.fanins.iter().map(|&f| g.name(f)).collect();
        let _ = writeln!(out, "{} = {}({})", n.name, kind, args.join(", "));
    }
    out
}
