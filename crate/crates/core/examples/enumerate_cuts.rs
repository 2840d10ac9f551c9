// SPDX-License-Identifier: Apache-2.0

//! The largest 3-cuts of every gate in c17, as CSV.

use kcut::cuts::{enumerate_design, CutConfig};
use kcut::parse_bench;

fn main() -> anyhow::Result<()> {
    let g = parse_bench(include_str!("../data/iscas85/c17.bench"))?;
    let cuts = enumerate_design(&g, &CutConfig::new(3, 2)?)?;
    eprintln!("{} cuts", cuts.total());
    print!("{}", cuts.to_csv(&g));
    Ok(())
}
