// SPDX-License-Identifier: Apache-2.0

//! Lock c432 with every scheme and check the correct key.

use kcut::locking::{find_corrupting_key, lock, overhead, verify_correct_key, LockConfig};
use kcut::normalize::normalize_bench;
use kcut::LockScheme;

fn main() -> anyhow::Result<()> {
    let g = normalize_bench(include_str!("../data/iscas85/c432.bench"))?;
    for scheme in LockScheme::ALL {
        let cfg = LockConfig::new(scheme, 32, 7);
        let locked = lock(&g, &cfg)?;
        let agree = verify_correct_key(&g, &locked, 1000, 7)?;
        let corrupts = find_corrupting_key(&g, &locked, cfg.hd(), 64, 7).is_some();
        println!(
            "{:7} lock gates {:3}  area ratio {:.3}  correct key {agree}/1000  wrong key corrupts {corrupts}",
            scheme.to_string(),
            locked.key.ground_truth_lock_gates.len(),
            overhead(&g, &locked.graph)?
        );
    }
    Ok(())
}
