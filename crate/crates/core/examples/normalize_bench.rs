// SPDX-License-Identifier: Apache-2.0

//! Parse a bench file and rewrite it into the 2-input cell library.
//!
//! cargo run --example normalize_bench -- [path.bench]

use kcut::normalize::normalize;
use kcut::{parse_bench, write_bench};

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/iscas85/c17.bench").into());
    let g = parse_bench(&std::fs::read_to_string(&path)?)?;
    let (n, report) = normalize(&g)?;
    eprintln!(
        "{} inputs, {} outputs: {} gates -> {} ({} constants folded, {} merged)",
        g.inputs().len(),
        g.outputs().len(),
        report.gates_before,
        report.gates_after,
        report.constants_folded,
        report.strash_merges
    );
    print!("{}", write_bench(&n));
    Ok(())
}
