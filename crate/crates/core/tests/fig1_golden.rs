// SPDX-License-Identifier: Apache-2.0

//! The c17 walk-through: 3-cuts of the original, the same after locking
//! three NAND gates with XOR key gates, and which gates NPN matching still
//! accounts for.

mod common;

use std::collections::{BTreeSet, HashMap};

use common::{cuts_with_volume, interior_labels, sets, C17};
use kcut::cuts::cut_truth_table;
use kcut::locking::{lock_trll_at, verify_correct_key};
use kcut::lockid::{builtin_templates, label_lock_gates};
use kcut::npn::canonical;
use kcut::{parse_bench, LockScheme};

#[test]
fn original_has_seven_three_cuts() {
    let g = parse_bench(C17).unwrap();
    let got: BTreeSet<_> = cuts_with_volume(&g, 3, 2).iter().map(|c| interior_labels(&g, c)).collect();
    let want = sets(&[
        &["G5", "G3"],
        &["G5", "G2"],
        &["G5", "G3", "G2"],
        &["G3", "G1"],
        &["G2", "G1"],
        &["G4", "G2"],
        &["G4", "G0"],
    ]);
    assert_eq!(got, want);
    assert_eq!(cuts_with_volume(&g, 3, 2).len(), 7);
}

#[test]
fn locked_distribution_and_npn_matches() {
    let g = parse_bench(C17).unwrap();
    let sites: Vec<_> = ["10", "11", "23"].iter().map(|n| g.find(n).unwrap()).collect();
    let locked = lock_trll_at(&g, &sites).unwrap();
    assert_eq!(locked.key.key_bits, vec![true; 3]);
    assert_eq!(verify_correct_key(&g, &locked, 0, 0).unwrap(), 32);

    let (labeled, report) = label_lock_gates(&locked.graph, &builtin_templates(LockScheme::Trll), Some(&locked.key));
    assert_eq!(report.precision, Some(1.0));
    assert_eq!(report.recall, Some(1.0));

    let cuts = cuts_with_volume(&labeled, 3, 2);
    let got: BTreeSet<_> = cuts.iter().map(|c| interior_labels(&labeled, c)).collect();
    assert_eq!(
        got,
        sets(&[&["G5", "G3"], &["G5", "G2"], &["G5", "G3", "G2"], &["G4", "G2"]])
    );

    // A locked cut matches when the original cut with the same interior has
    // the same NPN class; matched interiors are the gates still accounted for.
    let original: HashMap<BTreeSet<&str>, _> = cuts_with_volume(&g, 3, 2)
        .iter()
        .map(|c| (interior_labels(&g, c), canonical(&cut_truth_table(&g, c)).canonical))
        .collect();
    let mut accounted = BTreeSet::new();
    for c in &cuts {
        let key = interior_labels(&labeled, c);
        if original.get(&key) == Some(&canonical(&cut_truth_table(&labeled, c)).canonical) {
            accounted.extend(key);
        }
    }
    assert_eq!(accounted, BTreeSet::from(["G2", "G3", "G4", "G5"]));
}
