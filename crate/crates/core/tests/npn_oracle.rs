// SPDX-License-Identifier: Apache-2.0

//! NPN canonicalization against a brute-force orbit oracle that shares no
//! code with the library.

use std::collections::{HashMap, HashSet};

use kcut::npn::{canonical, TruthTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `g(x) = out ^ f(y)` with `y_perm[i] = x_i ^ neg_i`.
fn transform(k: usize, f: u64, perm: &[usize], neg: u32, out: bool) -> u64 {
    let mut g = 0u64;
    for x in 0..1usize << k {
        let mut y = 0usize;
        for (i, &p) in perm.iter().enumerate() {
            let bit = ((x >> i) & 1) ^ ((neg >> i) & 1) as usize;
            y |= bit << p;
        }
        if (((f >> y) & 1) == 1) ^ out {
            g |= 1 << x;
        }
    }
    g
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn orbit(k: usize, f: u64, perms: &[Vec<usize>]) -> HashSet<u64> {
    let mut s = HashSet::new();
    for p in perms {
        for neg in 0..1u32 << k {
            for out in [false, true] {
                s.insert(transform(k, f, p, neg, out));
            }
        }
    }
    s
}

/// All orbits of `k`-input functions.
fn orbits(k: usize) -> Vec<HashSet<u64>> {
    let perms = permutations(k);
    let n = 1u64 << (1 << k);
    let mut seen = vec![false; n as usize];
    let mut out = Vec::new();
    for f in 0..n {
        if !seen[f as usize] {
            let o = orbit(k, f, &perms);
            for &g in &o {
                seen[g as usize] = true;
            }
            out.push(o);
        }
    }
    out
}

fn lib(k: usize, f: u64) -> TruthTable {
    let c = canonical(&TruthTable::from_u64(k, f));
    assert!(c.exact, "k <= 6 is always exact");
    c.canonical
}

#[test]
fn class_counts_match_known_values() {
    for (k, want) in [(1, 2), (2, 4), (3, 14), (4, 222)] {
        assert_eq!(orbits(k).len(), want, "oracle k={k}");
    }
}

#[test]
fn canonical_forms_partition_like_orbits() {
    for k in 1..=4 {
        let mut rep_of_class: HashMap<TruthTable, usize> = HashMap::new();
        for (i, o) in orbits(k).iter().enumerate() {
            let reps: HashSet<TruthTable> = o.iter().map(|&f| lib(k, f)).collect();
            assert_eq!(reps.len(), 1, "k={k}: one orbit, several canonical forms");
            let rep = *reps.iter().next().unwrap();
            assert!(o.contains(&rep.words()[0]), "canonical form lies in its orbit");
            assert_eq!(rep_of_class.insert(rep, i), None, "k={k}: two orbits share a form");
        }
    }
}

#[test]
fn random_transforms_keep_the_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 5..=6 {
        for _ in 0..500 {
            let mask = if k == 6 { u64::MAX } else { (1u64 << (1 << k)) - 1 };
            let f = rng.gen::<u64>() & mask;
            let mut perm: Vec<usize> = (0..k).collect();
            for i in (1..k).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let g = transform(k, f, &perm, rng.gen::<u32>() & ((1 << k) - 1), rng.gen());
            assert_eq!(lib(k, f), lib(k, g));
        }
    }
}

#[test]
fn known_class_members() {
    // AND2, NOR2 and x & !y are one class; XOR2 and XNOR2 another.
    let and = lib(2, 0b1000);
    assert_eq!(lib(2, 0b0001), and);
    assert_eq!(lib(2, 0b0010), and);
    assert_eq!(lib(2, 0b0110), lib(2, 0b1001));
    assert_ne!(and, lib(2, 0b0110));
    // 3-input majority and its dual.
    assert_eq!(lib(3, 0xe8), lib(3, 0x17));
}
