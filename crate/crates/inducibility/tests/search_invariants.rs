//! Structural invariants of the exhaustive search: monotonicity in the host
//! size, population inclusion, and brute-force re-verification of argmax
//! trees.

use inducibility::counting::{count_copies_bruteforce, CopyCounter, DEFAULT_SUBSET_CAP};
use inducibility::search::{conjecture_check, max_density, SearchCaps};
use inducibility::tree::{even_tree, strict_even_tree, Arity};

fn arity(d: u32) -> Arity {
    Arity::new(d).unwrap()
}

fn caps() -> SearchCaps {
    SearchCaps::default()
}

#[test]
fn max_density_is_nonincreasing_in_host_size() {
    let d = arity(3);
    let pattern = even_tree(d, 3);
    let mut previous = None;
    for n in 3..=9u64 {
        let result = max_density(&pattern, d, n, false, &caps()).unwrap();
        if let Some(prev) = previous {
            assert!(
                result.max_density <= prev,
                "maximum density increased from {prev} at n = {n}"
            );
        }
        previous = Some(result.max_density);
    }
}

#[test]
fn strict_maxima_never_exceed_unrestricted_maxima() {
    let d = arity(3);
    let pattern = even_tree(d, 3);
    for idx in 2..=4u64 {
        let leaves = 2 * idx + 1;
        let strict = max_density(&pattern, d, leaves, true, &caps()).unwrap();
        let all = max_density(&pattern, d, leaves, false, &caps()).unwrap();
        assert!(strict.max_density <= all.max_density, "leaves = {leaves}");
    }
}

#[test]
fn strict_even_host_density_is_dominated_by_the_maximum() {
    let d = arity(3);
    let pattern = even_tree(d, 3);
    let mut counter = CopyCounter::new(&pattern, d).unwrap();
    for idx in 2..=4u64 {
        let host = strict_even_tree(d, idx);
        let gamma = counter.density(&host).unwrap();
        let result = max_density(&pattern, d, host.leaf_count(), false, &caps()).unwrap();
        assert!(gamma <= result.max_density);
        if result.argmax.contains(&host) {
            assert_eq!(gamma, result.max_density);
        }
    }
}

#[test]
fn argmax_trees_reverify_by_bruteforce() {
    let d = arity(3);
    let pattern = even_tree(d, 4);
    for n in 4..=8u64 {
        let result = max_density(&pattern, d, n, false, &caps()).unwrap();
        for t in &result.argmax {
            let slow = count_copies_bruteforce(&pattern, t, DEFAULT_SUBSET_CAP).unwrap();
            assert_eq!(slow, result.max_count, "argmax {t} at n = {n}");
        }
    }
}

#[test]
fn leaf_pattern_converges_with_zero_gap() {
    // A single leaf is induced by every singleton, so the maximum density
    // is identically one and the gap against its limit vanishes.
    use inducibility::search::convergence_table;
    use num::{BigRational, One, Zero};
    let rows = convergence_table(
        &inducibility::tree::Tree::Leaf,
        arity(3),
        (1, 8),
        false,
        &BigRational::one(),
        &caps(),
    )
    .unwrap();
    for row in rows {
        assert!(row.gap.is_zero());
        assert_eq!(row.n_times_gap, 0.0);
    }
}

#[test]
fn conjecture_report_structure() {
    let report = conjecture_check(arity(2), 3, 8, &caps()).unwrap();
    assert!(report.holds());
    assert_eq!(report.rows.len(), 8);
    for row in &report.rows {
        assert!(row.even_count <= row.max_count);
        assert!(!row.argmax.is_empty());
        assert!(row.even_is_argmax);
    }
}
