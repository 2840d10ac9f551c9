// SPDX-License-Identifier: Apache-2.0

//! Indistinguishability analysis for combinational logic locking.
//!
//! A locked netlist is normalized to a 2-input cell library, its lock gates
//! are labeled from the key inputs, every remaining gate contributes its
//! largest k-feasible cuts, and the NPN classes of those cuts form a design
//! signature. Signatures are compared against a corpus of known designs with
//! Jaccard similarity; the best match names the design that was locked.

pub mod cuts;
pub mod locking;
pub mod lockid;
pub mod netlist;
pub mod normalize;
pub mod npn;
pub mod repro;
pub mod signature;
pub mod sim;

pub use netlist::{parse_bench, write_bench, GateGraph, GateKind, KeyRecord, LockScheme, NodeId};
