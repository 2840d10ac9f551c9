// SPDX-License-Identifier: Apache-2.0

//! Label the lock logic of a locked design and score it against the key
//! record.

use kcut::locking::{lock, LockConfig};
use kcut::lockid::{builtin_templates, label_lock_gates};
use kcut::normalize::{normalize, normalize_bench};
use kcut::LockScheme;

fn main() -> anyhow::Result<()> {
    let g = normalize_bench(include_str!("../data/iscas85/c880.bench"))?;
    for scheme in LockScheme::ALL {
        let locked = lock(&g, &LockConfig::new(scheme, 32, 3))?;
        let (n, _) = normalize(&locked.graph)?;
        let (_, report) = label_lock_gates(&n, &builtin_templates(scheme), Some(&locked.key));
        println!(
            "{:7} labeled {:3} in {} rounds  precision {:?}  recall {:?}",
            scheme.to_string(),
            report.labeled_gates.len(),
            report.rounds,
            report.precision,
            report.recall
        );
    }
    Ok(())
}
