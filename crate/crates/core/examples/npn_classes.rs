// SPDX-License-Identifier: Apache-2.0

//! Count NPN classes of all functions of up to four inputs and show a few
//! canonical forms.

use std::collections::HashSet;

use kcut::npn::{canonical, TruthTable};

fn main() {
    for k in 1..=4 {
        let classes: HashSet<_> = (0..1u64 << (1 << k))
            .map(|f| canonical(&TruthTable::from_u64(k, f)).canonical)
            .collect();
        println!("{k} inputs: {} classes", classes.len());
    }
    for (name, bits) in [("and2", 0x8), ("nor2", 0x1), ("xor2", 0x6), ("xnor2", 0x9)] {
        println!("{name:5} -> {}", canonical(&TruthTable::from_u64(2, bits)).id());
    }
}
