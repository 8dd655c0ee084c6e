//! Exhaustive maximum-density search over all d-ary trees of a given size,
//! convergence tables against a reference value, and the even-tree
//! extremality check.
//!
//! Everything is exact: densities at one size share a denominator, so the
//! search compares big-integer copy counts and reports every argmax class.
//! Enumeration caps abort loudly instead of truncating.

use std::sync::Arc;

use num::{BigRational, BigUint, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::combinatorics::{binomial, rational};
use crate::counting::{CopyCounter, CountError, PatternTable};
use crate::tree::{even_tree, Arity, Tree, TreeEnumerator, TreeError};

#[derive(Error, Debug)]
pub enum SearchError {
    #[error("{needed} trees to scan exceed the configured cap of {cap}")]
    CapExceeded { needed: u64, cap: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Count(#[from] CountError),
}

#[derive(Debug, Clone, Copy)]
pub struct SearchCaps {
    /// Maximum number of isomorphism classes a single search may scan.
    pub trees: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { trees: 1_000_000 }
    }
}

/// Exact maximum density of a pattern over all (strictly) d-ary trees with
/// `n` leaves, together with every attaining class.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub pattern: Tree,
    pub n: u64,
    pub strict: bool,
    pub max_density: BigRational,
    pub max_count: BigUint,
    pub argmax: Vec<Tree>,
    pub trees_scanned: u64,
}

/// Scans every isomorphism class with `n` leaves and returns the exact
/// maximum density and all argmax trees, in canonical-key order.
pub fn max_density(
    pattern: &Tree,
    d: Arity,
    n: u64,
    strict: bool,
    caps: &SearchCaps,
) -> Result<SearchResult, SearchError> {
    let mut enumerator = TreeEnumerator::new(d);
    let table = Arc::new(PatternTable::new(pattern, d)?);
    max_density_inner(&mut enumerator, &table, n, strict, caps)
}

fn max_density_inner(
    enumerator: &mut TreeEnumerator,
    table: &Arc<PatternTable>,
    n: u64,
    strict: bool,
    caps: &SearchCaps,
) -> Result<SearchResult, SearchError> {
    let pattern = table.root_pattern().clone();
    let k = pattern.leaf_count();
    if k == 0 {
        return Err(SearchError::Domain(
            "search needs a nonempty pattern".into(),
        ));
    }
    if n < k {
        return Err(SearchError::Domain(format!(
            "host size {n} is smaller than the pattern size {k}"
        )));
    }
    let classes = enumerator.classes(n, strict)?;
    let scanned = classes.len() as u64;
    if scanned > caps.trees {
        return Err(SearchError::CapExceeded {
            needed: scanned,
            cap: caps.trees,
        });
    }
    // Partitioned fold with per-worker counters sharing the read-only
    // pattern table; the merge (max count, union of argmax) is associative
    // and commutative, so scheduling cannot change the result.
    let best = classes
        .par_chunks(64)
        .map(|chunk| -> Result<(BigUint, Vec<Tree>), SearchError> {
            let mut counter = CopyCounter::from_table(table.clone());
            let mut best_count = BigUint::zero();
            let mut argmax: Vec<Tree> = Vec::new();
            for t in chunk {
                let c = counter.count(t)?;
                if c > best_count {
                    best_count = c;
                    argmax.clear();
                    argmax.push(t.clone());
                } else if c == best_count {
                    argmax.push(t.clone());
                }
            }
            Ok((best_count, argmax))
        })
        .try_reduce(
            || (BigUint::zero(), Vec::new()),
            |mut a, mut b| {
                Ok(match a.0.cmp(&b.0) {
                    std::cmp::Ordering::Greater => a,
                    std::cmp::Ordering::Less => b,
                    std::cmp::Ordering::Equal => {
                        a.1.append(&mut b.1);
                        a
                    }
                })
            },
        )?;
    let (max_count, mut argmax) = best;
    argmax.sort_by(|a, b| a.canon_key().cmp(b.canon_key()));
    // A zero maximum is possible (a pattern the population cannot realize,
    // e.g. a binary caterpillar in strict ternary hosts); every class then
    // ties at density zero and the argmax list keeps them all.
    let max_density = rational(
        num::BigInt::from(max_count.clone()),
        num::BigInt::from(binomial(n, k)),
    );
    Ok(SearchResult {
        pattern,
        n,
        strict,
        max_density,
        max_count,
        argmax,
        trees_scanned: scanned,
    })
}

/// One row of a convergence table. In strict mode `n` is the strict index
/// and `leaves = (d-1)·n + 1`; otherwise `leaves = n`.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: u64,
    pub leaves: u64,
    pub max_density: BigRational,
    pub reference: BigRational,
    pub gap: BigRational,
    pub n_times_gap: f64,
}

/// Exact per-size maxima against a proven lower bound `reference` on the
/// inducibility (η or an exact value); `gap = max_density - reference`.
pub fn convergence_table(
    pattern: &Tree,
    d: Arity,
    range: (u64, u64),
    strict: bool,
    reference: &BigRational,
    caps: &SearchCaps,
) -> Result<Vec<ConvergenceRow>, SearchError> {
    let (from, to) = range;
    if from > to {
        return Err(SearchError::Domain(format!("empty range {from}..={to}")));
    }
    let mut enumerator = TreeEnumerator::new(d);
    let table = Arc::new(PatternTable::new(pattern, d)?);
    let mut rows = Vec::with_capacity((to - from + 1) as usize);
    for idx in from..=to {
        let leaves = if strict {
            u64::from(d.get() - 1) * idx + 1
        } else {
            idx
        };
        let result = max_density_inner(&mut enumerator, &table, leaves, strict, caps)?;
        let gap = result.max_density.clone() - reference.clone();
        let n_times_gap = idx as f64 * gap.to_f64().unwrap_or(f64::NAN);
        rows.push(ConvergenceRow {
            n: idx,
            leaves,
            max_density: result.max_density,
            reference: reference.clone(),
            gap,
            n_times_gap,
        });
    }
    Ok(rows)
}

/// CSV emission for convergence tables:
/// `n,leaves,max_density_num,max_density_den,gap_num,gap_den,n_times_gap`.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out =
        String::from("n,leaves,max_density_num,max_density_den,gap_num,gap_den,n_times_gap\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n,
            row.leaves,
            row.max_density.numer(),
            row.max_density.denom(),
            row.gap.numer(),
            row.gap.denom(),
            row.n_times_gap,
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct ConjectureRow {
    pub n: u64,
    pub max_count: BigUint,
    pub even_count: BigUint,
    pub even_is_argmax: bool,
    /// All maximizers at this size; inspected when the even tree is not
    /// among them.
    pub argmax: Vec<Tree>,
}

/// Outcome of checking that the even tree maximizes the copy count of a
/// fixed even pattern at every host size.
#[derive(Debug, Clone)]
pub struct ConjectureReport {
    pub d: Arity,
    pub k: u64,
    pub n_max: u64,
    pub rows: Vec<ConjectureRow>,
    pub counterexamples: Vec<u64>,
}

impl ConjectureReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// For every `n <= n_max`, checks whether the even tree with `n` leaves
/// attains the maximum of `c(E_k, ·)` over all n-leaf d-ary trees. Any
/// failing size is returned with its full argmax list.
pub fn conjecture_check(
    d: Arity,
    k: u64,
    n_max: u64,
    caps: &SearchCaps,
) -> Result<ConjectureReport, SearchError> {
    if k == 0 {
        return Err(SearchError::Domain(
            "the pattern needs at least one leaf".into(),
        ));
    }
    let pattern = even_tree(d, k);
    let mut enumerator = TreeEnumerator::new(d);
    let table = Arc::new(PatternTable::new(&pattern, d)?);
    let mut counter = CopyCounter::from_table(table.clone());
    let mut rows = Vec::new();
    let mut counterexamples = Vec::new();
    for n in 1..=n_max {
        let classes = enumerator.classes(n, false)?;
        if classes.len() as u64 > caps.trees {
            return Err(SearchError::CapExceeded {
                needed: classes.len() as u64,
                cap: caps.trees,
            });
        }
        let mut max_count = BigUint::zero();
        let mut argmax: Vec<Tree> = Vec::new();
        for t in classes.iter() {
            let c = counter.count(t)?;
            if c > max_count {
                max_count = c;
                argmax.clear();
                argmax.push(t.clone());
            } else if c == max_count {
                argmax.push(t.clone());
            }
        }
        let even_host = even_tree(d, n);
        let even_count = counter.count(&even_host)?;
        let even_is_argmax = even_count == max_count;
        if !even_is_argmax {
            counterexamples.push(n);
        }
        rows.push(ConjectureRow {
            n,
            max_count,
            even_count,
            even_is_argmax,
            argmax,
        });
    }
    Ok(ConjectureReport {
        d,
        k,
        n_max,
        rows,
        counterexamples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
pub struct SandwichViolation {
    pub n: u64,
    pub side: ViolationSide,
    pub max_density: BigRational,
    pub bound: BigRational,
}

#[derive(Debug, Clone)]
pub struct SandwichOutcome {
    pub ok: bool,
    pub violations: Vec<SandwichViolation>,
}

/// Verifies `I <= max γ <= I + k(k-1)/n` for a certified exact inducibility
/// `I` at every size in the range, exactly. Violations are collected, not
/// short-circuited.
pub fn sandwich_check(
    pattern: &Tree,
    d: Arity,
    exact: &BigRational,
    range: (u64, u64),
    caps: &SearchCaps,
) -> Result<SandwichOutcome, SearchError> {
    let k = pattern.leaf_count();
    let mut enumerator = TreeEnumerator::new(d);
    let table = Arc::new(PatternTable::new(pattern, d)?);
    let mut violations = Vec::new();
    for n in range.0..=range.1 {
        let result = max_density_inner(&mut enumerator, &table, n, false, caps)?;
        if result.max_density < *exact {
            violations.push(SandwichViolation {
                n,
                side: ViolationSide::Lower,
                max_density: result.max_density.clone(),
                bound: exact.clone(),
            });
        }
        let upper = exact.clone() + rational(num::BigInt::from(k * (k - 1)), num::BigInt::from(n));
        if result.max_density > upper {
            violations.push(SandwichViolation {
                n,
                side: ViolationSide::Upper,
                max_density: result.max_density,
                bound: upper,
            });
        }
    }
    Ok(SandwichOutcome {
        ok: violations.is_empty(),
        violations,
    })
}
