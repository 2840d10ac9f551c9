// SPDX-License-Identifier: Apache-2.0

//! Manifest-driven experiment grid: normalize the benchmarks, lock every
//! (design, scheme, key size, seed) cell, label, sign, rank against the
//! reference corpus and emit accuracy, heatmap and overhead tables.
//!
//! Output layout under the manifest's `output_dir`:
//!
//! ```text
//! reference/<design>.bench        normalized benchmarks
//! locked/<article>.bench          locked netlists as generated
//! locked/<article>.key.json       key and ground-truth lock gates
//! labeled/<article>.bench         normalized, lock-labeled articles
//! labeled/<article>.label.json    labeling report
//! signatures/<name>_k<k>.json     cached signatures (all n) with input digest
//! corpus/k<k>_n<n>.json           reference corpus
//! rankings/k<k>_n<n>.json         ranking of every article
//! accuracy.csv                    rank-1 accuracy per lock, key size, k, n
//! topk.csv                        top-1/5/10/20 accuracy per cell
//! heatmaps/k<k>_n<n>_<lock>_<key>.csv
//! heatmaps/k<k>_n<n>_reference.csv
//! overheads.csv
//! report.json                     per-cell status
//! ```
//!
//! Files are only rewritten when their content changes, and signatures are
//! recomputed only when the digest of their inputs changes, so a rerun with
//! an unchanged manifest skips all expensive work.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cuts::{CutConfig, DEFAULT_MAX_SEARCH};
use crate::locking::{find_corrupting_key, lock, overhead, verify_correct_key, LockConfig};
use crate::lockid::{builtin_templates, label_lock_gates};
use crate::netlist::{parse_bench, write_bench, GateGraph, LockScheme};
use crate::normalize::normalize;
use crate::signature::{
    build_signatures, compare_to_corpus, emit_heatmap, topk_accuracy, CorpusDb, DesignSignature, JaccardMode,
    RankedArticle, SimilarityMatrix,
};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Ranks reported in `topk.csv`.
pub const TOP_K: [usize; 4] = [1, 5, 10, 20];

/// Random vectors for correct-key checks of designs with more than 16 inputs.
const CHECK_VECTORS: usize = 1000;

#[derive(Debug, Error)]
pub enum ReproError {
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Signature(#[from] crate::signature::SignatureError),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockGrid {
    pub schemes: Vec<LockScheme>,
    pub key_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutGrid {
    pub k: Vec<usize>,
    pub n_select: Vec<usize>,
    #[serde(default = "default_max_search")]
    pub max_search: usize,
}

fn default_max_search() -> usize {
    DEFAULT_MAX_SEARCH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    /// Bench files; the file stem is the design name.
    pub benchmarks: Vec<PathBuf>,
    /// Designs left out of the reference corpus.
    #[serde(default)]
    pub reference_exclusions: Vec<String>,
    /// Design whose articles should be graded as another reference design,
    /// e.g. `c499 -> c1355` when the two are functionally equivalent.
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
    /// Designs to lock; all benchmarks when absent.
    #[serde(default)]
    pub targets: Option<Vec<String>>,
    pub lock_grid: LockGrid,
    pub cut_grid: CutGrid,
    #[serde(default)]
    pub jaccard: JaccardMode,
    /// Artifact root, relative to the working directory.
    pub output_dir: PathBuf,
}

impl ExperimentManifest {
    pub fn from_json(text: &str) -> Result<Self, ReproError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ReproError> {
        Self::from_json(&read(path)?)
    }

    pub fn design_names(&self) -> Vec<String> {
        self.benchmarks.iter().map(|p| design_name(p)).collect()
    }

    pub fn references(&self) -> Vec<String> {
        let mut r: Vec<String> = self
            .design_names()
            .into_iter()
            .filter(|d| !self.reference_exclusions.contains(d))
            .collect();
        r.sort();
        r
    }

    pub fn targets(&self) -> Vec<String> {
        self.targets.clone().unwrap_or_else(|| self.design_names())
    }

    /// Reference design an article of `design` is graded against.
    pub fn truth_of<'a>(&'a self, design: &'a str) -> &'a str {
        self.aliases.get(design).map_or(design, String::as_str)
    }

    pub fn validate(&self) -> Result<(), ReproError> {
        let bad = |m: String| Err(ReproError::Manifest(m));
        if self.benchmarks.is_empty() {
            return bad("no benchmarks".into());
        }
        let names = self.design_names();
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n) {
                return bad(format!("duplicate design name `{n}`"));
            }
        }
        let g = &self.lock_grid;
        if g.schemes.is_empty() || g.key_sizes.is_empty() || g.seeds.is_empty() {
            return bad("lock grid has an empty axis".into());
        }
        if g.key_sizes.contains(&0) {
            return bad("key size 0".into());
        }
        let c = &self.cut_grid;
        if c.k.is_empty() || c.n_select.is_empty() {
            return bad("cut grid has an empty axis".into());
        }
        for &k in &c.k {
            for &n in &c.n_select {
                CutConfig::new(k, n)
                    .and_then(|cfg| cfg.with_max_search(c.max_search))
                    .map_err(|e| ReproError::Manifest(e.to_string()))?;
            }
        }
        let refs = self.references();
        if refs.is_empty() {
            return bad("every benchmark is excluded from the reference corpus".into());
        }
        for t in self.targets() {
            if !names.contains(&t) {
                return bad(format!("target `{t}` is not a benchmark"));
            }
            let truth = self.truth_of(&t);
            if !refs.iter().any(|r| r == truth) {
                return bad(format!("target `{t}` is graded as `{truth}`, which is not a reference"));
            }
        }
        Ok(())
    }
}

fn design_name(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Worker count and seed override from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; all cores when `None`.
    pub jobs: Option<usize>,
    /// Replaces the manifest's seed list with this single seed.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// Outcome of one lock grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub article: String,
    pub design: String,
    pub truth: String,
    pub scheme: LockScheme,
    pub key_size: usize,
    pub seed: u64,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area_ratio: Option<f64>,
    /// Input vectors on which the correct key reproduced the original.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors_checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wrong_key_corrupts: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_recall: Option<f64>,
}

/// Accuracy of one (lock, key size, k, n) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub scheme: LockScheme,
    pub key_size: usize,
    pub k: usize,
    pub n_select: usize,
    pub articles: usize,
    /// Accuracy at each rank of [`TOP_K`].
    pub topk: Vec<f64>,
}

/// Machine-readable summary written to `report.json`; contains nothing
/// that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub references: Vec<String>,
    pub cells: Vec<CellRecord>,
    pub accuracy: Vec<AccuracyRow>,
}

impl RunReport {
    pub fn failed_cells(&self) -> impl Iterator<Item = &CellRecord> {
        self.cells.iter().filter(|c| c.status == CellStatus::Failed)
    }
}

/// Work counters of one run (not part of the report).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub files_written: usize,
    pub files_unchanged: usize,
    pub signatures_built: usize,
    pub signatures_cached: usize,
}

struct Out {
    root: PathBuf,
    written: AtomicUsize,
    unchanged: AtomicUsize,
}

impl Out {
    fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    /// Writes `content` unless the file already holds exactly that.
    fn put(&self, rel: &str, content: &str) -> Result<(), ReproError> {
        let path = self.path(rel);
        if fs::read(&path).is_ok_and(|old| old == content.as_bytes()) {
            self.unchanged.fetch_add(1, Ordering::Relaxed);
            return Ok(());
        }
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|source| ReproError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, content).map_err(|source| ReproError::Io { path, source })?;
        self.written.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, ReproError> {
    fs::read_to_string(path).map_err(|source| ReproError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize, Deserialize)]
struct CachedSignatures {
    digest: String,
    signatures: Vec<DesignSignature>,
}

struct Article {
    record: CellRecord,
    labeled: Option<GateGraph>,
}

/// Runs the whole grid. Benchmark paths are resolved against `base_dir`
/// (normally the manifest's directory); `output_dir` is used as given.
pub fn run_repro(
    manifest: &ExperimentManifest,
    base_dir: &Path,
    opts: RunOptions,
) -> Result<(RunReport, RunStats), ReproError> {
    let mut manifest = manifest.clone();
    if let Some(seed) = opts.seed {
        manifest.lock_grid.seeds = vec![seed];
    }
    manifest.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().map_err(|e| ReproError::Pool(e.to_string()))?;
    pool.install(|| run_grid(&manifest, base_dir))
}

fn run_grid(m: &ExperimentManifest, base_dir: &Path) -> Result<(RunReport, RunStats), ReproError> {
    // Every input is read and normalized before anything is written.
    let designs: Vec<(String, GateGraph)> = m
        .benchmarks
        .par_iter()
        .map(|p| {
            let path = base_dir.join(p);
            let fail = |message: String| ReproError::Input {
                path: path.clone(),
                message,
            };
            let g = parse_bench(&read(&path)?).map_err(|e| fail(e.to_string()))?;
            let (n, _) = normalize(&g).map_err(|e| fail(e.to_string()))?;
            Ok((design_name(p), n))
        })
        .collect::<Result<_, ReproError>>()?;
    let by_name: HashMap<&str, &GateGraph> = designs.iter().map(|(d, g)| (d.as_str(), g)).collect();
    let out = Out {
        root: m.output_dir.clone(),
        written: AtomicUsize::new(0),
        unchanged: AtomicUsize::new(0),
    };
    for (d, g) in &designs {
        out.put(&format!("reference/{d}.bench"), &write_bench(g))?;
    }

    let mut cells = Vec::new();
    for t in m.targets() {
        for &scheme in &m.lock_grid.schemes {
            for &key_size in &m.lock_grid.key_sizes {
                for &seed in &m.lock_grid.seeds {
                    cells.push((t.clone(), scheme, key_size, seed));
                }
            }
        }
    }
    let articles: Vec<Article> = cells
        .par_iter()
        .map(|(d, scheme, key_size, seed)| {
            run_cell(m, &out, d, by_name[d.as_str()], LockConfig::new(*scheme, *key_size, *seed))
        })
        .collect::<Result<_, ReproError>>()?;

    let mut csv = String::from("design,lock,key_size,seed,area_ratio\n");
    for a in &articles {
        let r = &a.record;
        let ratio = r.area_ratio.map(|v| format!("{v:.3}")).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{},{},{ratio}", r.design, r.scheme, r.key_size, r.seed);
    }
    out.put("overheads.csv", &csv)?;

    // Signatures: every benchmark (for the reference corpus and the
    // reference heatmap) and every generated article, at every k.
    let ks = &m.cut_grid.k;
    let ns = &m.cut_grid.n_select;
    let mut jobs: Vec<(&str, &GateGraph, usize)> = Vec::new();
    for &k in ks {
        for (d, g) in &designs {
            jobs.push((d, g, k));
        }
        for a in &articles {
            if let Some(g) = &a.labeled {
                jobs.push((&a.record.article, g, k));
            }
        }
    }
    let built = AtomicUsize::new(0);
    let sigs: Vec<Vec<DesignSignature>> = jobs
        .par_iter()
        .map(|&(name, g, k)| {
            let (s, fresh) = cached_signatures(&out, name, g, k, ns, m.cut_grid.max_search)?;
            built.fetch_add(fresh as usize, Ordering::Relaxed);
            Ok(s)
        })
        .collect::<Result<_, ReproError>>()?;
    let mut sig_of: HashMap<(&str, usize, usize), &DesignSignature> = HashMap::new();
    for ((name, _, k), per_n) in jobs.iter().zip(&sigs) {
        for s in per_n {
            sig_of.insert((name, *k, s.n_select), s);
        }
    }

    let refs = m.references();
    let names: Vec<String> = designs.iter().map(|(d, _)| d.clone()).collect();
    let ok: Vec<&CellRecord> = articles
        .iter()
        .filter(|a| a.labeled.is_some())
        .map(|a| &a.record)
        .collect();
    let mut accuracy = Vec::new();
    let mut rank1: HashMap<(LockScheme, usize, usize, usize), f64> = HashMap::new();
    let mut average: HashMap<(usize, usize), f64> = HashMap::new();
    for &k in ks {
        for &n in ns {
            let tag = format!("k{k}_n{n}");
            let db = CorpusDb::from_signatures(refs.iter().map(|r| sig_of[&(r.as_str(), k, n)].clone()))?;
            out.put(&format!("corpus/{tag}.json"), &db.to_json())?;
            let ranked: Vec<RankedArticle> = ok
                .iter()
                .map(|r| {
                    Ok(RankedArticle {
                        article: r.article.clone(),
                        truth: r.truth.clone(),
                        ranking: compare_to_corpus(sig_of[&(r.article.as_str(), k, n)], &db, m.jaccard)?,
                    })
                })
                .collect::<Result<_, ReproError>>()?;
            out.put(
                &format!("rankings/{tag}.json"),
                &(serde_json::to_string_pretty(&ranked)? + "\n"),
            )?;
            if !ranked.is_empty() {
                average.insert((k, n), topk_accuracy(&ranked, &[1])?[0]);
            }
            for &scheme in &m.lock_grid.schemes {
                for &key_size in &m.lock_grid.key_sizes {
                    let group: Vec<RankedArticle> = ok
                        .iter()
                        .zip(&ranked)
                        .filter(|(r, _)| r.scheme == scheme && r.key_size == key_size)
                        .map(|(_, a)| a.clone())
                        .collect();
                    if group.is_empty() {
                        continue;
                    }
                    let topk = topk_accuracy(&group, &TOP_K)?;
                    rank1.insert((scheme, key_size, k, n), topk[0]);
                    accuracy.push(AccuracyRow {
                        scheme,
                        key_size,
                        k,
                        n_select: n,
                        articles: group.len(),
                        topk,
                    });
                    let rows: Vec<DesignSignature> = group
                        .iter()
                        .map(|a| sig_of[&(a.article.as_str(), k, n)].clone())
                        .collect();
                    let heat = SimilarityMatrix::build(&rows, &db.entries, m.jaccard)?;
                    out.put(&format!("heatmaps/{tag}_{scheme}_{key_size}.csv"), &emit_heatmap(&heat))?;
                }
            }
            let all: Vec<DesignSignature> = names.iter().map(|d| sig_of[&(d.as_str(), k, n)].clone()).collect();
            let heat = SimilarityMatrix::build(&all, &all, m.jaccard)?;
            out.put(&format!("heatmaps/{tag}_reference.csv"), &emit_heatmap(&heat))?;
        }
    }
    out.put("accuracy.csv", &accuracy_table(m, &rank1, &average))?;
    out.put("topk.csv", &topk_table(&accuracy))?;

    let report = RunReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        references: refs,
        cells: articles.iter().map(|a| a.record.clone()).collect(),
        accuracy,
    };
    out.put("report.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
    let total_sigs = jobs.len();
    let built = built.into_inner();
    let stats = RunStats {
        files_written: out.written.into_inner(),
        files_unchanged: out.unchanged.into_inner(),
        signatures_built: built,
        signatures_cached: total_sigs - built,
    };
    Ok((report, stats))
}

/// Locks, checks, normalizes and labels one cell. Cell-level failures are
/// recorded in the returned record; only I/O errors propagate.
fn run_cell(
    m: &ExperimentManifest,
    out: &Out,
    design: &str,
    g: &GateGraph,
    cfg: LockConfig,
) -> Result<Article, ReproError> {
    let article = format!("{design}_{}_{}_s{}", cfg.scheme, cfg.key_size, cfg.seed);
    let mut record = CellRecord {
        article: article.clone(),
        design: design.into(),
        truth: m.truth_of(design).into(),
        scheme: cfg.scheme,
        key_size: cfg.key_size,
        seed: cfg.seed,
        status: CellStatus::Failed,
        error: None,
        area_ratio: None,
        vectors_checked: None,
        wrong_key_corrupts: None,
        label_precision: None,
        label_recall: None,
    };
    let failed = |mut r: CellRecord, e: String| {
        r.error = Some(e);
        Ok(Article {
            record: r,
            labeled: None,
        })
    };
    let locked = match lock(g, &cfg) {
        Ok(l) => l,
        Err(e) => return failed(record, e.to_string()),
    };
    match verify_correct_key(g, &locked, CHECK_VECTORS, cfg.seed) {
        Ok(n) => record.vectors_checked = Some(n),
        Err(e) => return failed(record, format!("correct key check: {e}")),
    }
    record.wrong_key_corrupts = Some(find_corrupting_key(g, &locked, cfg.hd(), 64, cfg.seed).is_some());
    match overhead(g, &locked.graph) {
        Ok(r) => record.area_ratio = Some(r),
        Err(e) => return failed(record, e.to_string()),
    }
    out.put(&format!("locked/{article}.bench"), &write_bench(&locked.graph))?;
    out.put(&format!("locked/{article}.key.json"), &locked.key.to_json())?;
    let normalized = match normalize(&locked.graph) {
        Ok((n, _)) => n,
        Err(e) => return failed(record, e.to_string()),
    };
    let (labeled, label) = label_lock_gates(&normalized, &builtin_templates(cfg.scheme), Some(&locked.key));
    record.label_precision = label.precision;
    record.label_recall = label.recall;
    out.put(&format!("labeled/{article}.bench"), &write_bench(&labeled))?;
    out.put(&format!("labeled/{article}.label.json"), &label.to_json())?;
    record.status = CellStatus::Ok;
    Ok(Article {
        record,
        labeled: Some(labeled),
    })
}

/// Signatures of `g` at cut size `k` for every `n`, reusing the cache file
/// when its digest matches. Returns whether they were recomputed.
fn cached_signatures(
    out: &Out,
    name: &str,
    g: &GateGraph,
    k: usize,
    ns: &[usize],
    max_search: usize,
) -> Result<(Vec<DesignSignature>, bool), ReproError> {
    let mut h = Sha256::new();
    h.update(format!("{TOOL} {VERSION}\nk={k} n={ns:?} max_search={max_search}\n"));
    h.update(write_bench(g));
    let digest = format!("{:x}", h.finalize());
    let rel = format!("signatures/{name}_k{k}.json");
    if let Ok(text) = fs::read_to_string(out.path(&rel)) {
        if let Ok(c) = serde_json::from_str::<CachedSignatures>(&text) {
            if c.digest == digest {
                return Ok((c.signatures, false));
            }
        }
    }
    let signatures = build_signatures(name, g, k, ns, max_search)?;
    let c = CachedSignatures { digest, signatures };
    out.put(&rel, &(serde_json::to_string_pretty(&c)? + "\n"))?;
    Ok((c.signatures, true))
}

/// Rank-1 accuracy laid out like the paper's accuracy table: one row per
/// (lock, key size), one column per (k, n_select), and an article-weighted
/// average row. Cells without articles are blank.
fn accuracy_table(
    m: &ExperimentManifest,
    rank1: &HashMap<(LockScheme, usize, usize, usize), f64>,
    average: &HashMap<(usize, usize), f64>,
) -> String {
    let mut s = String::from("lock,key_size");
    for &k in &m.cut_grid.k {
        for &n in &m.cut_grid.n_select {
            let _ = write!(s, ",k{k}_top{n}");
        }
    }
    s.push('\n');
    let cell = |v: Option<&f64>| v.map(|v| format!("{v:.3}")).unwrap_or_default();
    for &scheme in &m.lock_grid.schemes {
        for &key_size in &m.lock_grid.key_sizes {
            let _ = write!(s, "{scheme},{key_size}");
            for &k in &m.cut_grid.k {
                for &n in &m.cut_grid.n_select {
                    let _ = write!(s, ",{}", cell(rank1.get(&(scheme, key_size, k, n))));
                }
            }
            s.push('\n');
        }
    }
    s.push_str("average,");
    for &k in &m.cut_grid.k {
        for &n in &m.cut_grid.n_select {
            let _ = write!(s, ",{}", cell(average.get(&(k, n))));
        }
    }
    s.push('\n');
    s
}

fn topk_table(rows: &[AccuracyRow]) -> String {
    let mut s = String::from("lock,key_size,k,n_select,articles");
    for t in TOP_K {
        let _ = write!(s, ",top{t}");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{},{},{},{},{}", r.scheme, r.key_size, r.k, r.n_select, r.articles);
        for v in &r.topk {
            let _ = write!(s, ",{v:.3}");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data/iscas85")
    }

    fn manifest(out: &Path) -> ExperimentManifest {
        ExperimentManifest {
            benchmarks: vec![data_dir().join("c17.bench")],
            reference_exclusions: vec![],
            aliases: BTreeMap::new(),
            targets: None,
            lock_grid: LockGrid {
                schemes: vec![LockScheme::Trll],
                key_sizes: vec![2],
                seeds: vec![1],
            },
            cut_grid: CutGrid {
                k: vec![3],
                n_select: vec![5],
                max_search: DEFAULT_MAX_SEARCH,
            },
            jaccard: JaccardMode::Set,
            output_dir: out.to_path_buf(),
        }
    }

    #[test]
    fn single_cell_grid_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let m = manifest(dir.path());
        let (report, stats) = run_repro(&m, Path::new("/"), RunOptions::default()).unwrap();
        assert_eq!(report.cells.len(), 1);
        assert_eq!(report.cells[0].status, CellStatus::Ok);
        assert_eq!(report.accuracy.len(), 1);
        assert_eq!(report.accuracy[0].topk[0], 1.0);
        assert!(dir.path().join("locked/c17_trll_2_s1.bench").exists());
        assert!(dir.path().join("rankings/k3_n5.json").exists());
        assert_eq!(stats.signatures_built, 2);
        let (again, stats) = run_repro(&m, Path::new("/"), RunOptions::default()).unwrap();
        assert_eq!(again, report);
        assert_eq!(stats.files_written, 0);
        assert_eq!(stats.signatures_built, 0);
    }

    #[test]
    fn failed_cells_are_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = manifest(dir.path());
        m.lock_grid.schemes = vec![LockScheme::SfllHd, LockScheme::Trll];
        m.lock_grid.key_sizes = vec![64];
        let (report, _) = run_repro(&m, Path::new("/"), RunOptions::default()).unwrap();
        assert_eq!(report.failed_cells().count(), 2);
        assert!(report.accuracy.is_empty());
    }

    #[test]
    fn invalid_manifests_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let mut m = manifest(&out);
        m.cut_grid.k = vec![9];
        assert!(matches!(
            run_repro(&m, Path::new("/"), RunOptions::default()),
            Err(ReproError::Manifest(_))
        ));
        let mut m = manifest(&out);
        m.benchmarks.push(dir.path().join("missing.bench"));
        assert!(matches!(
            run_repro(&m, Path::new("/"), RunOptions::default()),
            Err(ReproError::Io { .. })
        ));
        assert!(!out.exists());
    }
}
