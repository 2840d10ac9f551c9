// SPDX-License-Identifier: Apache-2.0

//! Run an experiment manifest and print the accuracy table.
//!
//! cargo run --release --example repro_desk -- [manifest.json] [out_dir]

use std::path::PathBuf;

use kcut::repro::{run_repro, ExperimentManifest, RunOptions};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let path: PathBuf = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/manifests/desk.json").into())
        .into();
    let mut manifest = ExperimentManifest::load(&path)?;
    if let Some(out) = args.next() {
        manifest.output_dir = out.into();
    }
    let base = path.parent().unwrap_or(std::path::Path::new("."));
    let (report, stats) = run_repro(&manifest, base, RunOptions::default())?;
    for row in &report.accuracy {
        println!(
            "{:7} key {:3} k {} n {:2}: top-1 {:.3} over {} articles",
            row.scheme.to_string(), row.key_size, row.k, row.n_select, row.topk[0], row.articles
        );
    }
    for cell in report.failed_cells() {
        println!("failed {}: {}", cell.article, cell.error.as_deref().unwrap_or(""));
    }
    eprintln!("{} files written into {}", stats.files_written, manifest.output_dir.display());
    Ok(())
}
