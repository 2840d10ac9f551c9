// SPDX-License-Identifier: Apache-2.0

//! Build a small reference corpus, lock one design and rank the corpus
//! against the locked article.

use kcut::cuts::CutConfig;
use kcut::locking::{lock, LockConfig};
use kcut::lockid::{builtin_templates, label_lock_gates};
use kcut::normalize::{normalize, normalize_bench};
use kcut::signature::{build_signature, compare_to_corpus, CorpusDb, JaccardMode};
use kcut::LockScheme;

fn main() -> anyhow::Result<()> {
    let cfg = CutConfig::new(6, 20)?;
    let designs = [
        ("c432", include_str!("../data/iscas85/c432.bench")),
        ("c880", include_str!("../data/iscas85/c880.bench")),
        ("c1355", include_str!("../data/iscas85/c1355.bench")),
        ("c1908", include_str!("../data/iscas85/c1908.bench")),
    ];
    let mut db = CorpusDb::new(6, 20);
    for (name, text) in designs {
        db.insert(build_signature(name, &normalize_bench(text)?, &cfg)?)?;
    }

    let original = normalize_bench(designs[1].1)?;
    let locked = lock(&original, &LockConfig::new(LockScheme::Trll, 32, 5))?;
    let (labeled, _) = label_lock_gates(&normalize(&locked.graph)?.0, &builtin_templates(LockScheme::Trll), None);
    let sig = build_signature("c880_trll_32", &labeled, &cfg)?;
    for entry in compare_to_corpus(&sig, &db, JaccardMode::Set)? {
        println!("{:6} {:.3}", entry.design, entry.score);
    }
    Ok(())
}
