//! Enumeration against an independent class-counting recurrence, plus
//! structural invariants of the tree generators.

use std::collections::{HashMap, HashSet};

use inducibility::tree::{
    complete_tree, enumerate_trees, even_tree, strict_even_tree, Arity, Tree,
};

fn arity(d: u32) -> Arity {
    Arity::new(d).unwrap()
}

/// Number of multisets of size `m` over `n` types: C(n+m-1, m).
fn multichoose(n: u64, m: u64) -> u64 {
    if m == 0 {
        return 1;
    }
    let mut acc: u128 = 1;
    for i in 0..m {
        acc = acc * (n as u128 + m as u128 - 1 - i as u128) / (i as u128 + 1);
    }
    acc as u64
}

/// Independent class counter: a tree with n > 1 leaves is an unordered
/// multiset of 2..=d (exactly d in strict mode) smaller trees.
fn class_count(d: u64, n: u64, strict: bool, memo: &mut HashMap<(u64, bool), u64>) -> u64 {
    if n == 1 {
        return 1;
    }
    if let Some(&v) = memo.get(&(n, strict)) {
        return v;
    }
    let mut total = 0u64;
    let arities: Vec<u64> = if strict { vec![d] } else { (2..=d).collect() };
    for r in arities {
        let mut parts = Vec::new();
        total += partition_sum(d, n, r, 1, strict, &mut parts, memo);
    }
    memo.insert((n, strict), total);
    total
}

fn partition_sum(
    d: u64,
    n: u64,
    r: u64,
    min: u64,
    strict: bool,
    parts: &mut Vec<u64>,
    memo: &mut HashMap<(u64, bool), u64>,
) -> u64 {
    let size_ok = |p: u64| !strict || p % (d - 1) == 1 % (d - 1);
    if r == 1 {
        if n < min || !size_ok(n) {
            return 0;
        }
        parts.push(n);
        let result = multiset_weight(d, parts, strict, memo);
        parts.pop();
        return result;
    }
    let mut total = 0;
    let mut p = min;
    while p * r <= n {
        if size_ok(p) {
            parts.push(p);
            total += partition_sum(d, n - p, r - 1, p, strict, parts, memo);
            parts.pop();
        }
        p += 1;
    }
    total
}

fn multiset_weight(
    d: u64,
    parts: &[u64],
    strict: bool,
    memo: &mut HashMap<(u64, bool), u64>,
) -> u64 {
    let mut weight = 1u64;
    let mut i = 0;
    while i < parts.len() {
        let run = parts[i..].iter().take_while(|&&p| p == parts[i]).count() as u64;
        let types = class_count(d, parts[i], strict, memo);
        weight *= multichoose(types, run);
        i += run as usize;
    }
    weight
}

#[test]
fn binary_counts_match_recurrence_up_to_12() {
    let mut memo = HashMap::new();
    // Prefix frozen independently; the recurrence extends it.
    let known = [1u64, 1, 1, 2, 3, 6, 11, 23];
    for (i, &expected) in known.iter().enumerate() {
        assert_eq!(class_count(2, i as u64 + 1, false, &mut memo), expected);
    }
    for n in 1..=12u64 {
        let enumerated = enumerate_trees(arity(2), n, false).unwrap().count() as u64;
        assert_eq!(enumerated, class_count(2, n, false, &mut memo), "n = {n}");
    }
}

#[test]
fn ternary_counts_match_recurrence_up_to_9() {
    let mut memo = HashMap::new();
    for n in 1..=9u64 {
        let enumerated = enumerate_trees(arity(3), n, false).unwrap().count() as u64;
        assert_eq!(enumerated, class_count(3, n, false, &mut memo), "n = {n}");
    }
    assert_eq!(class_count(3, 4, false, &mut memo), 4);
}

#[test]
fn strict_counts_match_recurrence() {
    let mut memo = HashMap::new();
    for n in [1u64, 3, 5, 7, 9] {
        let enumerated = enumerate_trees(arity(3), n, true).unwrap().count() as u64;
        assert_eq!(enumerated, class_count(3, n, true, &mut memo), "n = {n}");
    }
    let mut memo4 = HashMap::new();
    for n in [1u64, 4, 7, 10] {
        let enumerated = enumerate_trees(arity(4), n, true).unwrap().count() as u64;
        assert_eq!(enumerated, class_count(4, n, true, &mut memo4), "n = {n}");
    }
}

#[test]
fn enumerated_classes_are_distinct_and_valid() {
    for d in [2u32, 3] {
        for n in 1..=8u64 {
            let mut seen = HashSet::new();
            for t in enumerate_trees(arity(d), n, false).unwrap() {
                assert_eq!(t.leaf_count(), n);
                t.validate_arity(arity(d)).unwrap();
                assert!(seen.insert(t.canon_key().to_owned()), "duplicate class {t}");
            }
        }
    }
}

#[test]
fn generator_leaf_counts_scale() {
    for d in 2..=5u32 {
        for k in 0..=200u64 {
            assert_eq!(even_tree(arity(d), k).leaf_count(), k);
        }
        for n in 0..=200u64 {
            let t = strict_even_tree(arity(d), n);
            assert_eq!(t.leaf_count(), u64::from(d - 1) * n + 1);
            assert!(t.is_strictly_d_ary(arity(d)));
        }
    }
}

#[test]
fn generator_branches_are_balanced() {
    for d in 2..=5u32 {
        for k in 2..=120u64 {
            let t = even_tree(arity(d), k);
            let sizes: Vec<u64> = t.children().iter().map(Tree::leaf_count).collect();
            let spread = sizes.iter().max().unwrap() - sizes.iter().min().unwrap();
            assert!(spread <= 1, "even tree k = {k} has branch sizes {sizes:?}");
        }
        for n in 1..=120u64 {
            let t = strict_even_tree(arity(d), n);
            let sizes: Vec<u64> = t.children().iter().map(Tree::leaf_count).collect();
            let spread = sizes.iter().max().unwrap() - sizes.iter().min().unwrap();
            assert!(spread <= u64::from(d - 1), "index {n} sizes {sizes:?}");
        }
    }
}

#[test]
fn complete_trees_are_even_trees_at_powers() {
    for d in 2..=4u32 {
        for h in 0..=3u32 {
            let leaves = u64::from(d).pow(h);
            if leaves > 256 {
                continue;
            }
            assert_eq!(complete_tree(arity(d), h), even_tree(arity(d), leaves));
        }
    }
}
