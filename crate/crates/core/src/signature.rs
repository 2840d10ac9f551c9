// SPDX-License-Identifier: Apache-2.0

//! Design signatures (NPN class distributions of selected cuts), the
//! reference corpus, Jaccard comparison, ranking and evaluation tables.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cuts::{cut_truth_table, enumerate_design, CutConfig, CutError};
use crate::netlist::GateGraph;
use crate::npn::{canonical, NpnClass, TruthTable};

#[derive(Debug, Error)]
pub enum SignatureError {
    #[error("parameter mismatch: ({0}, {1}) vs ({2}, {3})")]
    ParamMismatch(usize, usize, usize, usize),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("design `{0}` already in corpus")]
    Duplicate(String),
    #[error("no ground truth for article `{0}`")]
    MissingTruth(String),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// NPN class histogram of one design's selected cuts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSignature {
    pub design: String,
    pub k: usize,
    #[serde(rename = "n")]
    pub n_select: usize,
    /// Canonical class id (`k:hex`) to occurrence count.
    pub classes: BTreeMap<String, u64>,
    /// Fraction of cuts whose canonical form was computed exactly.
    pub exact_fraction: f64,
}

impl DesignSignature {
    pub fn total(&self) -> u64 {
        self.classes.values().sum()
    }

    fn params(&self) -> (usize, usize) {
        (self.k, self.n_select)
    }
}

/// Enumerates and selects cuts, then canonicalizes each selected cut.
pub fn build_signature(design: &str, g: &GateGraph, cfg: &CutConfig) -> Result<DesignSignature, SignatureError> {
    let mut sigs = build_signatures(design, g, cfg.k, &[cfg.n_select], cfg.max_search)?;
    Ok(sigs.pop().expect("one selection size"))
}

/// Signatures at one cut size for several selection sizes, sharing a single
/// enumeration: the top `n` cuts of a root are a prefix of its top `m >= n`.
/// Results follow the order of `n_selects`.
pub fn build_signatures(
    design: &str,
    g: &GateGraph,
    k: usize,
    n_selects: &[usize],
    max_search: usize,
) -> Result<Vec<DesignSignature>, SignatureError> {
    let Some(&n_max) = n_selects.iter().max() else {
        return Ok(Vec::new());
    };
    for &n in n_selects {
        CutConfig::new(k, n)?.with_max_search(max_search)?;
    }
    let cfg = CutConfig::new(k, n_max)?.with_max_search(max_search)?;
    let cuts = enumerate_design(g, &cfg)?;
    let tables: Vec<Vec<TruthTable>> = cuts
        .per_root
        .iter()
        .map(|(_, cs)| cs.iter().map(|c| cut_truth_table(g, c)).collect())
        .collect();
    let mut unique: Vec<TruthTable> = tables.iter().flatten().copied().collect::<HashSet<_>>().into_iter().collect();
    unique.sort_unstable();
    let classes: HashMap<TruthTable, NpnClass> = unique.par_iter().map(|t| (*t, canonical(t))).collect();
    Ok(n_selects
        .iter()
        .map(|&n| {
            let mut hist = BTreeMap::new();
            let (mut exact, mut total) = (0usize, 0usize);
            for t in tables.iter().flat_map(|ts| ts.iter().take(n)) {
                let c = classes[t];
                exact += c.exact as usize;
                total += 1;
                *hist.entry(c.id()).or_insert(0) += 1;
            }
            DesignSignature {
                design: design.to_string(),
                k,
                n_select: n,
                classes: hist,
                exact_fraction: if total == 0 { 1.0 } else { exact as f64 / total as f64 },
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JaccardMode {
    /// Class sets; counts ignored.
    #[default]
    Set,
    /// Sum of per-class minimum counts over sum of maximum counts.
    Multiset,
}

/// Jaccard similarity of two signatures with equal `(k, n_select)`; 1.0 when
/// both are empty.
pub fn jaccard(a: &DesignSignature, b: &DesignSignature, mode: JaccardMode) -> Result<f64, SignatureError> {
    if a.params() != b.params() {
        return Err(SignatureError::ParamMismatch(a.k, a.n_select, b.k, b.n_select));
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for (class, &ca) in &a.classes {
        let cb = b.classes.get(class).copied().unwrap_or(0);
        match mode {
            JaccardMode::Set => {
                inter += (cb > 0) as u64;
                union += 1;
            }
            JaccardMode::Multiset => {
                inter += ca.min(cb);
                union += ca.max(cb);
            }
        }
    }
    for (class, &cb) in &b.classes {
        if !a.classes.contains_key(class) {
            union += match mode {
                JaccardMode::Set => 1,
                JaccardMode::Multiset => cb,
            };
        }
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMeta {
    pub k: usize,
    pub n: usize,
    pub tool: String,
    pub version: String,
}

/// Reference signatures sharing one `(k, n_select)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusDb {
    pub meta: CorpusMeta,
    pub entries: Vec<DesignSignature>,
}

impl CorpusDb {
    pub fn new(k: usize, n_select: usize) -> Self {
        Self {
            meta: CorpusMeta {
                k,
                n: n_select,
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            entries: Vec::new(),
        }
    }

    pub fn from_signatures(sigs: impl IntoIterator<Item = DesignSignature>) -> Result<Self, SignatureError> {
        let mut sigs = sigs.into_iter().peekable();
        let first = sigs.peek().ok_or(SignatureError::EmptyCorpus)?;
        let mut db = Self::new(first.k, first.n_select);
        for s in sigs {
            db.insert(s)?;
        }
        Ok(db)
    }

    /// Adds a signature, keeping entries sorted by design name.
    pub fn insert(&mut self, sig: DesignSignature) -> Result<(), SignatureError> {
        if sig.params() != (self.meta.k, self.meta.n) {
            return Err(SignatureError::ParamMismatch(self.meta.k, self.meta.n, sig.k, sig.n_select));
        }
        match self.entries.binary_search_by(|e| e.design.cmp(&sig.design)) {
            Ok(_) => Err(SignatureError::Duplicate(sig.design)),
            Err(pos) => {
                self.entries.insert(pos, sig);
                Ok(())
            }
        }
    }

    pub fn get(&self, design: &str) -> Option<&DesignSignature> {
        self.entries.iter().find(|e| e.design == design)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("corpus serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, SignatureError> {
        let db: Self = serde_json::from_str(text)?;
        let mut check = Self::new(db.meta.k, db.meta.n);
        check.meta = db.meta.clone();
        for e in db.entries {
            check.insert(e)?;
        }
        Ok(check)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub design: String,
    pub score: f64,
}

/// Scores `sig` against every corpus entry: descending score, ties by name.
pub fn compare_to_corpus(
    sig: &DesignSignature,
    db: &CorpusDb,
    mode: JaccardMode,
) -> Result<Vec<RankEntry>, SignatureError> {
    if db.entries.is_empty() {
        return Err(SignatureError::EmptyCorpus);
    }
    let mut out = db
        .entries
        .iter()
        .map(|e| {
            Ok(RankEntry {
                design: e.design.clone(),
                score: jaccard(sig, e, mode)?,
            })
        })
        .collect::<Result<Vec<_>, SignatureError>>()?;
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.design.cmp(&b.design)));
    Ok(out)
}

/// One ranked article with the design it was generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedArticle {
    pub article: String,
    pub truth: String,
    pub ranking: Vec<RankEntry>,
}

impl RankedArticle {
    /// 1-based rank of the true design, if present.
    pub fn rank_of_truth(&self) -> Option<usize> {
        self.ranking.iter().position(|r| r.design == self.truth).map(|p| p + 1)
    }
}

/// For each `k` in `ks`, the fraction of articles whose true design is
/// within the first `k` ranking entries.
pub fn topk_accuracy(articles: &[RankedArticle], ks: &[usize]) -> Result<Vec<f64>, SignatureError> {
    for a in articles {
        if a.truth.is_empty() {
            return Err(SignatureError::MissingTruth(a.article.clone()));
        }
    }
    let n = articles.len().max(1) as f64;
    Ok(ks
        .iter()
        .map(|&k| {
            articles
                .iter()
                .filter(|a| a.rank_of_truth().is_some_and(|r| r <= k))
                .count() as f64
                / n
        })
        .collect())
}

/// Jaccard scores of locked designs (rows) against references (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn build(
        rows: &[DesignSignature],
        cols: &[DesignSignature],
        mode: JaccardMode,
    ) -> Result<Self, SignatureError> {
        let values = rows
            .iter()
            .map(|r| cols.iter().map(|c| jaccard(r, c, mode)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            rows: rows.iter().map(|r| r.design.clone()).collect(),
            cols: cols.iter().map(|c| c.design.clone()).collect(),
            values,
        })
    }

    /// Mean over cells whose row and column name differ.
    pub fn mean_off_diagonal(&self) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (r, row) in self.rows.iter().zip(&self.values) {
            for (c, v) in self.cols.iter().zip(row) {
                if r != c {
                    sum += v;
                    n += 1;
                }
            }
        }
        (n > 0).then(|| sum / n as f64)
    }
}

/// CSV with a header of reference names and one row per locked design.
pub fn emit_heatmap(m: &SimilarityMatrix) -> String {
    let mut s = String::from("design");
    for c in &m.cols {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for (r, row) in m.rows.iter().zip(&m.values) {
        s.push_str(r);
        for v in row {
            let _ = write!(s, ",{v:.3}");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_bench, write_bench};

    fn sig(name: &str, classes: &[(&str, u64)]) -> DesignSignature {
        DesignSignature {
            design: name.into(),
            k: 4,
            n_select: 5,
            classes: classes.iter().map(|(c, n)| (c.to_string(), *n)).collect(),
            exact_fraction: 1.0,
        }
    }

    #[test]
    fn jaccard_examples() {
        let a = sig("a", &[("A", 1), ("B", 3), ("C", 1)]);
        let b = sig("b", &[("B", 1), ("C", 1), ("D", 2)]);
        assert_eq!(jaccard(&a, &b, JaccardMode::Set).unwrap(), 0.5);
        assert_eq!(jaccard(&a, &a, JaccardMode::Set).unwrap(), 1.0);
        assert_eq!(jaccard(&a, &sig("z", &[("Z", 1)]), JaccardMode::Set).unwrap(), 0.0);
        // min: B1 C1 = 2; max: A1 B3 C1 D2 = 7
        assert!((jaccard(&a, &b, JaccardMode::Multiset).unwrap() - 2.0 / 7.0).abs() < 1e-12);
        assert_eq!(jaccard(&sig("x", &[]), &sig("y", &[]), JaccardMode::Set).unwrap(), 1.0);
        let mut c = b.clone();
        c.k = 6;
        assert!(jaccard(&a, &c, JaccardMode::Set).is_err());
    }

    #[test]
    fn ranking_ties_and_order() {
        let q = sig("q", &[("A", 1)]);
        let db1 = CorpusDb::from_signatures([sig("b", &[("A", 1)]), sig("a", &[("A", 1)]), sig("c", &[])]).unwrap();
        let db2 = CorpusDb::from_signatures([sig("c", &[]), sig("a", &[("A", 1)]), sig("b", &[("A", 1)])]).unwrap();
        let r1 = compare_to_corpus(&q, &db1, JaccardMode::Set).unwrap();
        assert_eq!(r1, compare_to_corpus(&q, &db2, JaccardMode::Set).unwrap());
        let names: Vec<&str> = r1.iter().map(|r| r.design.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        assert!(CorpusDb::from_signatures([sig("a", &[]), sig("a", &[])]).is_err());
        assert!(compare_to_corpus(&q, &CorpusDb::new(4, 5), JaccardMode::Set).is_err());
    }

    #[test]
    fn corpus_json_round_trip() {
        let db = CorpusDb::from_signatures([sig("c432", &[("4:1", 2)]), sig("c17", &[("2:1", 1)])]).unwrap();
        let text = db.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["entries"][0]["design"], "c17");
        assert_eq!(v["entries"][1]["classes"]["4:1"], 2);
        assert_eq!(v["entries"][0]["n"], 5);
        assert_eq!(CorpusDb::from_json(&text).unwrap(), db);
    }

    #[test]
    fn accuracy_is_monotone() {
        let art = |truth: &str, order: &[&str]| RankedArticle {
            article: format!("{truth}_x"),
            truth: truth.into(),
            ranking: order
                .iter()
                .map(|d| RankEntry {
                    design: d.to_string(),
                    score: 0.0,
                })
                .collect(),
        };
        let a = [art("a", &["a", "b"]), art("b", &["a", "b"]), art("c", &["a", "b"])];
        let acc = topk_accuracy(&a, &[1, 2, 5]).unwrap();
        assert_eq!(acc, vec![1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]);
        assert!(topk_accuracy(&[art("", &[])], &[1]).is_err());
    }

    #[test]
    fn heatmap_csv() {
        let a = sig("a", &[("A", 1)]);
        let m = SimilarityMatrix::build(std::slice::from_ref(&a), std::slice::from_ref(&a), JaccardMode::Set).unwrap();
        assert_eq!(emit_heatmap(&m), "design,a\na,1.000\n");
        assert_eq!(m.mean_off_diagonal(), None);
    }

    #[test]
    fn signature_survives_bench_round_trip() {
        let g = parse_bench(include_str!("../data/iscas85/c17.bench")).unwrap();
        let cfg = CutConfig::new(3, 20).unwrap();
        let s1 = build_signature("c17", &g, &cfg).unwrap();
        let s2 = build_signature("c17", &parse_bench(&write_bench(&g)).unwrap(), &cfg).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.exact_fraction, 1.0);
        assert!(s1.total() <= 20 * 6);
    }

    #[test]
    fn shared_enumeration_matches_single_builds() {
        let g = parse_bench(include_str!("../data/iscas85/c432.bench")).unwrap();
        let g = crate::normalize::normalize(&g).unwrap().0;
        let many = build_signatures("c432", &g, 4, &[20, 1, 5], crate::cuts::DEFAULT_MAX_SEARCH).unwrap();
        for s in &many {
            let one = build_signature("c432", &g, &CutConfig::new(4, s.n_select).unwrap()).unwrap();
            assert_eq!(&one, s);
        }
    }
}
