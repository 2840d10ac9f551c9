// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. Every verb reads and checks all of its inputs
//! before it writes anything.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use kcut::cuts::{CutConfig, DEFAULT_MAX_SEARCH};
use kcut::locking::{lock, LockConfig, OverheadReport};
use kcut::lockid::{builtin_templates, label_lock_gates};
use kcut::normalize::normalize;
use kcut::repro::{run_repro, ExperimentManifest, RunOptions, TOP_K};
use kcut::signature::{
    build_signature, compare_to_corpus, emit_heatmap, topk_accuracy, CorpusDb, DesignSignature, JaccardMode,
    RankedArticle, SimilarityMatrix,
};
use kcut::{parse_bench, write_bench, GateGraph, KeyRecord, LockScheme};

#[derive(Parser)]
#[command(name = "kcut", version, about = "k-cut NPN signatures for locked netlists")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a bench netlist to 2-input gates, fold constants and strash.
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lock a netlist and write the locked bench and its key file.
    Lock {
        #[arg(long)]
        scheme: LockScheme,
        #[arg(long)]
        key_size: usize,
        /// Hamming distance for sfllhd (default: key size / 2).
        #[arg(long)]
        hd: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        keyfile: PathBuf,
    },
    /// Normalize a locked netlist and label its lock gates.
    Label {
        #[arg(long)]
        scheme: LockScheme,
        #[arg(long = "in")]
        input: PathBuf,
        /// Key file: names the key inputs and enables precision/recall.
        #[arg(long)]
        keyfile: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Labeling report (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compute the signature of one netlist.
    Sign {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        cut: CutArgs,
        /// Design name (default: file stem).
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reference corpus operations.
    Db {
        #[command(subcommand)]
        cmd: DbCmd,
    },
    /// Rank a signature against a corpus (CSV on stdout or `--out`).
    Compare {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[arg(long, value_enum, default_value = "set")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Top-k accuracy of article signatures against a corpus. Each article is
    /// `PATH[=TRUTH]`; the truth defaults to the signature's design name up to
    /// the first underscore.
    Evaluate {
        #[arg(long)]
        db: PathBuf,
        #[arg(required = true)]
        articles: Vec<String>,
        #[arg(long, value_enum, default_value = "set")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Similarity matrix CSV: the given signatures (or the corpus itself)
    /// against every corpus entry.
    Heatmap {
        #[arg(long)]
        db: PathBuf,
        sigs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "set")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the experiment grid described by a manifest.
    Repro {
        manifest: PathBuf,
        /// Overrides the manifest's seed list.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the manifest's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DbCmd {
    /// Build a corpus from reference netlists (normalized on the fly).
    Build {
        #[command(flatten)]
        cut: CutArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        benches: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct CutArgs {
    /// Cut size.
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Cuts kept per root.
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_SEARCH)]
    max_search: usize,
}

impl CutArgs {
    fn config(&self) -> Result<CutConfig> {
        Ok(CutConfig::new(self.k, self.n)?.with_max_search(self.max_search)?)
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    Set,
    Multiset,
}

impl From<Mode> for JaccardMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Set => JaccardMode::Set,
            Mode::Multiset => JaccardMode::Multiset,
        }
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write(p: &Path, text: &str) -> Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(p, text).with_context(|| format!("writing {}", p.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_bench(p: &Path) -> Result<GateGraph> {
    parse_bench(&read(p)?).with_context(|| format!("parsing {}", p.display()))
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load_sig(p: &Path) -> Result<DesignSignature> {
    serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))
}

fn load_db(p: &Path) -> Result<CorpusDb> {
    CorpusDb::from_json(&read(p)?).with_context(|| format!("parsing {}", p.display()))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    match cli.cmd {
        Cmd::Normalize { input, out } => {
            let (g, report) = normalize(&load_bench(&input)?)?;
            write(&out, &write_bench(&g))?;
            eprintln!(
                "{} gates -> {} ({} constants folded, {} merged)",
                report.gates_before, report.gates_after, report.constants_folded, report.strash_merges
            );
        }
        Cmd::Lock {
            scheme,
            key_size,
            hd,
            seed,
            input,
            out,
            keyfile,
        } => {
            let g = load_bench(&input)?;
            let mut cfg = LockConfig::new(scheme, key_size, seed);
            if let Some(h) = hd {
                cfg = cfg.with_hd(h);
            }
            let locked = lock(&g, &cfg)?;
            let oh = OverheadReport::measure(&stem(&input), scheme, key_size, &g, &locked.graph)?;
            write(&out, &write_bench(&locked.graph))?;
            write(&keyfile, &locked.key.to_json())?;
            eprintln!("area ratio {:.3}", oh.area_ratio);
        }
        Cmd::Label {
            scheme,
            input,
            keyfile,
            out,
            report,
        } => {
            let mut g = load_bench(&input)?;
            let key = match &keyfile {
                Some(p) => {
                    let k = KeyRecord::from_json(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
                    g = g.with_key_inputs(&k.key_input_names)?;
                    Some(k)
                }
                None => None,
            };
            if g.key_inputs().next().is_none() {
                bail!("{} has no key inputs", input.display());
            }
            let (n, _) = normalize(&g)?;
            let (labeled, rep) = label_lock_gates(&n, &builtin_templates(scheme), key.as_ref());
            write(&out, &write_bench(&labeled))?;
            if let Some(r) = report {
                write(&r, &rep.to_json())?;
            }
            eprintln!("{} gates labeled in {} rounds", rep.labeled_gates.len(), rep.rounds);
        }
        Cmd::Sign { input, cut, name, out } => {
            let g = load_bench(&input)?;
            let sig = build_signature(&name.unwrap_or_else(|| stem(&input)), &g, &cut.config()?)?;
            write(&out, &(serde_json::to_string_pretty(&sig)? + "\n"))?;
        }
        Cmd::Db {
            cmd: DbCmd::Build { cut, out, benches },
        } => {
            let cfg = cut.config()?;
            let graphs = benches
                .iter()
                .map(|p| Ok((stem(p), normalize(&load_bench(p)?)?.0)))
                .collect::<Result<Vec<_>>>()?;
            let sigs = graphs
                .iter()
                .map(|(d, g)| build_signature(d, g, &cfg))
                .collect::<Result<Vec<_>, _>>()?;
            write(&out, &CorpusDb::from_signatures(sigs)?.to_json())?;
        }
        Cmd::Compare { db, sig, mode, out } => {
            let ranking = compare_to_corpus(&load_sig(&sig)?, &load_db(&db)?, mode.into())?;
            let mut csv = String::from("rank,design,score\n");
            for (i, r) in ranking.iter().enumerate() {
                csv += &format!("{},{},{:.3}\n", i + 1, r.design, r.score);
            }
            emit(out.as_deref(), &csv)?;
        }
        Cmd::Evaluate { db, articles, mode, out } => {
            let db = load_db(&db)?;
            let ranked = articles
                .iter()
                .map(|a| {
                    let (path, truth) = match a.split_once('=') {
                        Some((p, t)) => (p, Some(t.to_string())),
                        None => (a.as_str(), None),
                    };
                    let sig = load_sig(Path::new(path))?;
                    let truth = truth.unwrap_or_else(|| sig.design.split('_').next().unwrap_or_default().to_string());
                    Ok(RankedArticle {
                        article: sig.design.clone(),
                        truth,
                        ranking: compare_to_corpus(&sig, &db, mode.into())?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let acc = topk_accuracy(&ranked, &TOP_K)?;
            let mut csv = String::from("article,truth,rank\n");
            for a in &ranked {
                let rank = a.rank_of_truth().map(|r| r.to_string()).unwrap_or_default();
                csv += &format!("{},{},{rank}\n", a.article, a.truth);
            }
            for (k, v) in TOP_K.iter().zip(acc) {
                csv += &format!("top{k},,{v:.3}\n");
            }
            emit(out.as_deref(), &csv)?;
        }
        Cmd::Heatmap { db, sigs, mode, out } => {
            let db = load_db(&db)?;
            let rows = if sigs.is_empty() {
                db.entries.clone()
            } else {
                sigs.iter().map(|p| load_sig(p)).collect::<Result<Vec<_>>>()?
            };
            let m = SimilarityMatrix::build(&rows, &db.entries, mode.into())?;
            emit(out.as_deref(), &emit_heatmap(&m))?;
        }
        Cmd::Repro { manifest, seed, out } => {
            let mut m = ExperimentManifest::load(&manifest)?;
            if let Some(o) = out {
                m.output_dir = o;
            }
            let base = manifest.parent().unwrap_or(Path::new("."));
            let (report, stats) = run_repro(&m, base, RunOptions { jobs: cli.jobs, seed })?;
            for c in report.failed_cells() {
                eprintln!("failed: {} ({})", c.article, c.error.as_deref().unwrap_or(""));
            }
            eprintln!(
                "{} cells, {} failed; {} files written, {} unchanged; {} signatures built, {} cached",
                report.cells.len(),
                report.failed_cells().count(),
                stats.files_written,
                stats.files_unchanged,
                stats.signatures_built,
                stats.signatures_cached
            );
        }
    }
    Ok(())
}
