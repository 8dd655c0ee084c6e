//! Exact copy counts `c(D,T)` and densities via the branch recursion.
//!
//! For a pattern `D` with padded branches `D_1..D_d` and a host `T` with
//! padded branches `T_1..T_d`, every copy of `D` either lives inside a
//! single branch of `T` or spans several, in which case its root is the
//! root of `T` and each branch of `D` is induced inside a distinct branch
//! of `T`:
//!
//! ```text
//! c(D,T) = Σ_i c(D,T_i) + Σ_π Π_j c(D_{π(j)}, T_j)
//! ```
//!
//! where `π` ranges over branch arrangements that are distinct up to
//! isomorphism. Conventions: an empty pattern has count 1 in any host, a
//! nonempty pattern has count 0 in the empty host. The dynamic program
//! evaluates this bottom-up over the host for every pattern in the closure
//! of `D` under branch decomposition, memoized per canonical subtree, and
//! enumerates the arrangement sum over distinct multiset permutations of
//! the branch classes rather than all `d!` permutations.
//!
//! [`count_copies_bruteforce`] is the definitional oracle: it enumerates
//! leaf subsets, induces, and tests isomorphism.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use itertools::Itertools;
use num::{BigRational, BigUint, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::combinatorics::{binomial, factorial};
use crate::tree::{branches, induce_subtree, Arity, Tree, TreeError};

/// Default ceiling on the number of leaf subsets the brute-force counter
/// will enumerate.
pub const DEFAULT_SUBSET_CAP: u64 = 10_000_000;

#[derive(Error, Debug)]
pub enum CountError {
    #[error("{required} subsets exceed the configured cap of {cap}")]
    CapExceeded { required: BigUint, cap: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Branch decomposition of a nonempty tree, grouped by isomorphism class.
#[derive(Debug, Clone)]
pub struct BranchSignature {
    classes: Vec<(Tree, u32)>,
    m_profile: BTreeMap<u64, u32>,
    m_size: BigUint,
}

impl BranchSignature {
    /// Distinct branch classes with multiplicities, in canonical order.
    /// The empty tree appears as a class when the root degree is below `d`;
    /// multiplicities sum to `d`.
    pub fn classes(&self) -> &[(Tree, u32)] {
        &self.classes
    }

    /// Number of branches with `j` leaves, for every occurring `j`
    /// (including `j = 0` for empty padding branches).
    pub fn m_profile(&self) -> &BTreeMap<u64, u32> {
        &self.m_profile
    }

    /// Number of branch arrangements distinct up to isomorphism:
    /// `d! / Π (class multiplicity)!`.
    pub fn m_size(&self) -> &BigUint {
        &self.m_size
    }

    /// Product of `m_j!` over the leaf-count profile.
    pub fn size_profile_factorials(&self) -> BigUint {
        self.m_profile
            .values()
            .map(|&m| factorial(u64::from(m)))
            .product()
    }

    /// Padded branch leaf counts in descending order.
    pub fn exponents(&self, d: Arity) -> Vec<u64> {
        let mut out = Vec::with_capacity(d.as_usize());
        for (t, mult) in &self.classes {
            out.extend(std::iter::repeat_n(t.leaf_count(), *mult as usize));
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

/// Groups the padded branches of a nonempty tree by isomorphism class.
pub fn branch_signature(t: &Tree, d: Arity) -> BranchSignature {
    let padded = branches(t, d);
    let mut classes: Vec<(Tree, u32)> = Vec::new();
    for b in padded {
        match classes.iter_mut().find(|(c, _)| *c == b) {
            Some((_, mult)) => *mult += 1,
            None => classes.push((b, 1)),
        }
    }
    classes.sort_by(|a, b| a.0.cmp(&b.0));
    let mut m_profile = BTreeMap::new();
    for (c, mult) in &classes {
        *m_profile.entry(c.leaf_count()).or_insert(0) += *mult;
    }
    let mut m_size = factorial(u64::from(d.get()));
    for (_, mult) in &classes {
        m_size /= factorial(u64::from(*mult));
    }
    BranchSignature {
        classes,
        m_profile,
        m_size,
    }
}

enum PatternKind {
    Empty,
    Leaf,
    /// Branch classes as `(pattern index, multiplicity)`; multiplicities sum to `d`.
    Internal(Vec<(usize, u32)>),
}

/// The closure of a pattern under branch decomposition (always containing
/// the empty tree and the single leaf), with branch classes resolved to
/// table indices.
pub struct PatternTable {
    d: Arity,
    trees: Vec<Tree>,
    kinds: Vec<PatternKind>,
    index: HashMap<Box<str>, usize>,
    root: usize,
}

impl PatternTable {
    pub fn new(pattern: &Tree, d: Arity) -> Result<Self, CountError> {
        pattern.validate_arity(d)?;
        // Collect the closure, then sort by (leaf count, key) so indices are
        // deterministic with Empty at 0 and Leaf at 1.
        let mut trees: Vec<Tree> = vec![Tree::Empty, Tree::Leaf];
        let mut seen: HashMap<Box<str>, ()> =
            trees.iter().map(|t| (t.canon_key().into(), ())).collect();
        let mut stack = vec![pattern.clone()];
        while let Some(t) = stack.pop() {
            if seen.contains_key(t.canon_key()) {
                continue;
            }
            seen.insert(t.canon_key().into(), ());
            stack.extend(t.children().iter().cloned());
            trees.push(t);
        }
        trees.sort();
        let index: HashMap<Box<str>, usize> = trees
            .iter()
            .enumerate()
            .map(|(i, t)| (t.canon_key().into(), i))
            .collect();
        let kinds = trees
            .iter()
            .map(|t| match t {
                Tree::Empty => PatternKind::Empty,
                Tree::Leaf => PatternKind::Leaf,
                Tree::Internal(_) => {
                    let sig = branch_signature(t, d);
                    let classes = sig
                        .classes()
                        .iter()
                        .map(|(c, mult)| (index[c.canon_key()], *mult))
                        .collect();
                    PatternKind::Internal(classes)
                }
            })
            .collect();
        let root = index[pattern.canon_key()];
        Ok(PatternTable {
            d,
            trees,
            kinds,
            index,
            root,
        })
    }

    pub fn arity(&self) -> Arity {
        self.d
    }

    /// All patterns in the closure, in canonical order.
    pub fn patterns(&self) -> &[Tree] {
        &self.trees
    }

    pub fn root_pattern(&self) -> &Tree {
        &self.trees[self.root]
    }

    pub fn signature_of(&self, t: &Tree) -> Option<BranchSignature> {
        self.index
            .get(t.canon_key())
            .map(|_| branch_signature(t, self.d))
    }
}

/// Memoizing copy counter for one pattern table; reusable across hosts, so
/// hosts sharing canonical subtrees share work.
pub struct CopyCounter {
    table: Arc<PatternTable>,
    cache: HashMap<Box<str>, Arc<Vec<BigUint>>>,
}

impl CopyCounter {
    pub fn new(pattern: &Tree, d: Arity) -> Result<Self, CountError> {
        Ok(Self::from_table(Arc::new(PatternTable::new(pattern, d)?)))
    }

    /// A fresh counter over a shared table; used by parallel workers.
    pub fn from_table(table: Arc<PatternTable>) -> Self {
        CopyCounter {
            table,
            cache: HashMap::new(),
        }
    }

    pub fn table(&self) -> &Arc<PatternTable> {
        &self.table
    }

    /// Exact number of leaf subsets of `host` inducing a copy of the
    /// pattern. Zero when the pattern has more leaves than the host; one
    /// when the pattern is empty.
    pub fn count(&mut self, host: &Tree) -> Result<BigUint, CountError> {
        host.validate_arity(self.table.d)?;
        if host.is_empty() {
            return Ok(if self.table.root_pattern().is_empty() {
                BigUint::one()
            } else {
                BigUint::zero()
            });
        }
        let root = self.table.root;
        Ok(self.counts_for(host)[root].clone())
    }

    /// Density of the pattern in `host`: `c(D,T) / C(‖T‖,‖D‖)`.
    pub fn density(&mut self, host: &Tree) -> Result<BigRational, CountError> {
        let k = self.table.root_pattern().leaf_count();
        let n = host.leaf_count();
        if k == 0 || n < k {
            return Err(CountError::Domain(format!(
                "density needs ‖T‖ ≥ ‖D‖ ≥ 1, got ‖T‖ = {n}, ‖D‖ = {k}"
            )));
        }
        let c = self.count(host)?;
        Ok(BigRational::new(c.into(), binomial(n, k).into()))
    }

    fn counts_for(&mut self, node: &Tree) -> Arc<Vec<BigUint>> {
        if let Some(v) = self.cache.get(node.canon_key()) {
            return v.clone();
        }
        let table = self.table.clone();
        let kinds = &table.kinds;
        let counts = match node {
            Tree::Empty => kinds
                .iter()
                .map(|k| base_count(matches!(k, PatternKind::Empty)))
                .collect(),
            Tree::Leaf => kinds
                .iter()
                .map(|k| base_count(matches!(k, PatternKind::Empty | PatternKind::Leaf)))
                .collect(),
            Tree::Internal(_) => {
                let child_counts: Vec<Arc<Vec<BigUint>>> =
                    node.children().iter().map(|c| self.counts_for(c)).collect();
                let empty = self.counts_for(&Tree::Empty);
                let mut padded: Vec<&Vec<BigUint>> = child_counts.iter().map(Arc::as_ref).collect();
                padded.resize(table.d.as_usize(), empty.as_ref());
                let mut out = Vec::with_capacity(kinds.len());
                for (idx, kind) in kinds.iter().enumerate() {
                    let c = match kind {
                        PatternKind::Empty => BigUint::one(),
                        PatternKind::Leaf => BigUint::from(node.leaf_count()),
                        PatternKind::Internal(classes) => {
                            let single: BigUint =
                                child_counts.iter().map(|cc| cc[idx].clone()).sum();
                            let mut remaining: Vec<(usize, u32)> = classes.clone();
                            let cross = cross_sum(&mut remaining, &padded, 0, &BigUint::one());
                            single + cross
                        }
                    };
                    out.push(c);
                }
                out
            }
        };
        let shared = Arc::new(counts);
        self.cache.insert(node.canon_key().into(), shared.clone());
        shared
    }
}

fn base_count(one: bool) -> BigUint {
    if one {
        BigUint::one()
    } else {
        BigUint::zero()
    }
}

/// Sums `Π_j c(class(j), T_j)` over all distinct assignments of the class
/// multiset to host branch positions. `positions[pos][class_idx]` is the
/// count of that class pattern in the branch at `pos`.
fn cross_sum(
    remaining: &mut Vec<(usize, u32)>,
    positions: &[&Vec<BigUint>],
    pos: usize,
    acc: &BigUint,
) -> BigUint {
    if pos == positions.len() {
        return acc.clone();
    }
    let mut total = BigUint::zero();
    for i in 0..remaining.len() {
        let (class_idx, mult) = remaining[i];
        if mult == 0 {
            continue;
        }
        let factor = &positions[pos][class_idx];
        if factor.is_zero() {
            continue;
        }
        remaining[i].1 -= 1;
        let next = acc * factor;
        total += cross_sum(remaining, positions, pos + 1, &next);
        remaining[i].1 += 1;
    }
    total
}

/// One-shot copy count; build a [`CopyCounter`] instead when counting the
/// same pattern in many hosts.
pub fn count_copies(pattern: &Tree, host: &Tree, d: Arity) -> Result<BigUint, CountError> {
    CopyCounter::new(pattern, d)?.count(host)
}

/// Definitional copy count: enumerates every `‖D‖`-leaf subset of the host,
/// induces it, and tests isomorphism. Fails with [`CountError::CapExceeded`]
/// when more than `cap` subsets would be scanned.
pub fn count_copies_bruteforce(
    pattern: &Tree,
    host: &Tree,
    cap: u64,
) -> Result<BigUint, CountError> {
    if pattern.is_empty() {
        return Ok(BigUint::one());
    }
    let k = pattern.leaf_count();
    let n = host.leaf_count();
    if k > n {
        return Ok(BigUint::zero());
    }
    let subsets = binomial(n, k);
    if subsets.to_u64().is_none_or(|s| s > cap) {
        return Err(CountError::CapExceeded {
            required: subsets,
            cap,
        });
    }
    let mut count = BigUint::zero();
    for subset in (0..n).combinations(k as usize) {
        let induced = induce_subtree(host, &subset)?;
        if induced == *pattern {
            count += 1u32;
        }
    }
    Ok(count)
}

/// Exact density `γ(D,T) = c(D,T) / C(‖T‖,‖D‖)`; requires `‖T‖ ≥ ‖D‖ ≥ 1`.
pub fn density(pattern: &Tree, host: &Tree, d: Arity) -> Result<BigRational, CountError> {
    CopyCounter::new(pattern, d)?.density(host)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::rational;
    use crate::tree::{caterpillar, even_tree, strict_even_tree};
    use num::Signed;

    fn d(n: u32) -> Arity {
        Arity::new(n).unwrap()
    }

    #[test]
    fn signature_of_even_tree_with_mixed_branches() {
        // Branches 3, 2, 2: one arrangement per choice of the odd slot.
        let sig = branch_signature(&even_tree(d(3), 7), d(3));
        assert_eq!(sig.m_size(), &BigUint::from(3u32));
        assert_eq!(sig.classes().len(), 2);
        assert_eq!(sig.exponents(d(3)), vec![3, 2, 2]);
    }

    #[test]
    fn signature_identical_and_padded_branches() {
        let sig = branch_signature(&even_tree(d(3), 9), d(3));
        assert_eq!(sig.m_size(), &BigUint::one());

        let cherry = caterpillar(2);
        let sig = branch_signature(&cherry, d(2));
        assert_eq!(sig.classes(), &[(Tree::Leaf, 2)]);
        assert_eq!(sig.m_size(), &BigUint::one());

        // In a ternary context the cherry has an empty padding branch.
        let sig = branch_signature(&cherry, d(3));
        assert_eq!(sig.m_size(), &BigUint::from(3u32));
        assert_eq!(sig.m_profile().get(&0), Some(&1));
    }

    #[test]
    fn leaf_pattern_counts_leaves() {
        let host = even_tree(d(3), 9);
        assert_eq!(
            count_copies(&Tree::Leaf, &host, d(3)).unwrap(),
            BigUint::from(9u32)
        );
        assert_eq!(density(&Tree::Leaf, &host, d(3)).unwrap(), rational(1, 1));
    }

    #[test]
    fn cherry_counts_pairs_in_binary_hosts() {
        let cherry = caterpillar(2);
        for host in [
            caterpillar(6),
            even_tree(d(2), 6),
            strict_even_tree(d(2), 5),
        ] {
            let n = host.leaf_count();
            assert_eq!(
                count_copies(&cherry, &host, d(2)).unwrap(),
                binomial(n, 2),
                "host {host}"
            );
            assert_eq!(density(&cherry, &host, d(2)).unwrap(), rational(1, 1));
        }
    }

    #[test]
    fn recursion_matches_bruteforce_on_strict_even_host() {
        let star3 = even_tree(d(3), 3);
        let host = strict_even_tree(d(3), 3);
        let fast = count_copies(&star3, &host, d(3)).unwrap();
        let slow = count_copies_bruteforce(&star3, &host, DEFAULT_SUBSET_CAP).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn empty_pattern_and_oversized_pattern() {
        let host = even_tree(d(2), 4);
        assert_eq!(
            count_copies(&Tree::Empty, &host, d(2)).unwrap(),
            BigUint::one()
        );
        let big = even_tree(d(2), 8);
        assert_eq!(count_copies(&big, &host, d(2)).unwrap(), BigUint::zero());
        assert!(matches!(
            density(&big, &host, d(2)),
            Err(CountError::Domain(_))
        ));
    }

    #[test]
    fn bruteforce_cap_is_enforced() {
        let host = even_tree(d(2), 40);
        let pat = even_tree(d(2), 8);
        assert!(matches!(
            count_copies_bruteforce(&pat, &host, 1000),
            Err(CountError::CapExceeded { .. })
        ));
    }

    #[test]
    fn density_approaches_the_strict_even_limit() {
        // γ(E³₃, H³₅₀) lies within 10/50 of 1/4.
        let star3 = even_tree(d(3), 3);
        let host = strict_even_tree(d(3), 50);
        let gamma = density(&star3, &host, d(3)).unwrap();
        let gap = (gamma - rational(1, 4)).abs();
        assert!(gap <= rational(10, 50), "gap {gap}");
    }

    #[test]
    fn arity_validation_propagates() {
        let ternary = even_tree(d(3), 3);
        assert!(matches!(
            count_copies(&ternary, &ternary, d(2)),
            Err(CountError::Tree(TreeError::Arity { .. }))
        ));
    }
}
