//! The strict-even limit `η_d`, the simplex function `Z_D`, and every
//! closed-form or certified bound on the inducibility `I_d(D)`.
//!
//! `η_d(D)` is the limit density of `D` inside the strict even trees
//! ([`crate::tree::strict_even_tree`]); it always lower-bounds the
//! inducibility and obeys the exact recursion
//!
//! ```text
//! η_d(D) = C(‖D‖; ‖D_1‖..‖D_d‖) · |M(D)| / (d^‖D‖ - d) · Π η_d(D_i)
//! ```
//!
//! with value 1 on the empty tree and the single leaf. Upper bounds come
//! from the branch decomposition through the symmetric rational function
//!
//! ```text
//! Z_D(x) = (Σ_π Π_j x_j^{‖D_π(j)‖}) / (1 - Σ_i x_i^‖D‖)
//! ```
//!
//! on the simplex: the inducibility is at most the branch-size multinomial
//! times the product of branch inducibilities times `sup Z_D`. The supremum
//! has a closed form when the branch sizes are balanced (Muirhead: attained
//! at the uniform point, value `|M(D)|/(d^k - d)`) and when exactly one of
//! two nonempty branches is a single leaf (value `1/k`, approached at the
//! boundary); otherwise a deterministic multi-start simplex search gives a
//! heuristic value and a certified combinatorial cap remains the only safe
//! upper bound.
//!
//! Exactness propagates recursively: when every branch is known to attain
//! `I_d = η_d` and `sup Z_D` is attained at the uniform point, `D` itself
//! attains `I_d(D) = η_d(D)`. Stars, even trees, complete trees and binary
//! caterpillars have independent closed forms, cross-checked in the tests.

mod simplex;

use std::collections::HashMap;
use std::rc::Rc;

use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::combinatorics::{big_pow, factorial, multinomial, rational, rational_int};
use crate::counting::{branch_signature, BranchSignature};
use crate::tree::{even_tree, is_balanced, Arity, Tree, TreeError};

pub use simplex::grid_scan;

#[derive(Error, Debug)]
pub enum BoundsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Settings for the heuristic simplex search.
#[derive(Debug, Clone)]
pub struct NumericOptions {
    /// Seed for the deterministic start-point generator.
    pub seed: u64,
    /// A point must beat the uniform value by more than this to refute the
    /// uniform-supremum condition.
    pub tolerance: f64,
    /// Number of seeded random starts, in addition to the uniform point and
    /// the fixed corner paths.
    pub starts: usize,
    pub max_iterations: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            seed: 0,
            tolerance: 1e-9,
            starts: 64,
            max_iterations: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundsOptions {
    /// `None` disables the heuristic search; suprema without closed form
    /// then fall back to their certified cap.
    pub numeric: Option<NumericOptions>,
    /// Accept the (unproven) claim that a binary tree whose branch sizes
    /// differ by exactly two attains `sup Z_D` at the uniform point. Off by
    /// default; enables the sharper closed-form upper bound for such trees.
    pub assume_gap_two_supremum: bool,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions {
            numeric: Some(NumericOptions::default()),
            assume_gap_two_supremum: false,
        }
    }
}

// ---------------------------------------------------------------------------
// η and φ
// ---------------------------------------------------------------------------

/// Exact limit density of `t` in the strict even trees; always in `(0, 1]`
/// and a lower bound on the inducibility.
pub fn eta(t: &Tree, d: Arity) -> Result<BigRational, BoundsError> {
    t.validate_arity(d)?;
    let mut memo = HashMap::new();
    Ok(eta_rec(t, d, &mut memo))
}

fn eta_rec(t: &Tree, d: Arity, memo: &mut HashMap<Tree, BigRational>) -> BigRational {
    if t.leaf_count() <= 1 {
        return BigRational::one();
    }
    if let Some(v) = memo.get(t) {
        return v.clone();
    }
    let sig = branch_signature(t, d);
    let k = t.leaf_count();
    let mut value = rational(
        BigInt::from(multinomial(k, &sig.exponents(d)) * sig.m_size()),
        BigInt::from(big_pow(u64::from(d.get()), k) - d.get()),
    );
    for child in t.children() {
        value *= eta_rec(child, d, memo);
    }
    memo.insert(t.clone(), value.clone());
    value
}

/// The scaled limit `φ(D) = (d-1)^‖D‖ η_d(D) / ‖D‖!`, which satisfies the
/// product recursion `φ(D) = |M(D)|/(d^‖D‖-d) · Π φ(D_i)` with `φ` of the
/// empty tree 1 and of a leaf `d-1`.
pub fn phi(t: &Tree, d: Arity) -> Result<BigRational, BoundsError> {
    let k = t.leaf_count();
    let scale = rational(
        BigInt::from(big_pow(u64::from(d.get()) - 1, k)),
        BigInt::from(factorial(k)),
    );
    Ok(scale * eta(t, d)?)
}

// ---------------------------------------------------------------------------
// Z_D and its supremum
// ---------------------------------------------------------------------------

/// Symbolic form of the simplex function `Z_D`: the branch-size exponent
/// profile plus the arrangement count `|M(D)|`.
#[derive(Debug, Clone)]
pub struct ZFunction {
    d: Arity,
    total_leaves: u64,
    exponents: Vec<u64>,
    m_size: BigUint,
    arrangements: Vec<Vec<u64>>,
}

/// Builds `Z_D` from a nonempty tree with at least two leaves.
pub fn z_function(t: &Tree, d: Arity) -> Result<ZFunction, BoundsError> {
    t.validate_arity(d)?;
    if t.leaf_count() < 2 {
        return Err(BoundsError::Domain(format!(
            "Z is defined for trees with at least 2 leaves, got {}",
            t.leaf_count()
        )));
    }
    let sig = branch_signature(t, d);
    Ok(ZFunction::from_signature(&sig, d, t.leaf_count()))
}

impl ZFunction {
    fn from_signature(sig: &BranchSignature, d: Arity, total_leaves: u64) -> Self {
        let exponents = sig.exponents(d);
        let arrangements = distinct_permutations(&exponents);
        ZFunction {
            d,
            total_leaves,
            exponents,
            m_size: sig.m_size().clone(),
            arrangements,
        }
    }

    pub fn arity(&self) -> Arity {
        self.d
    }

    pub fn total_leaves(&self) -> u64 {
        self.total_leaves
    }

    /// Padded branch leaf counts, descending; they sum to `total_leaves`.
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn m_size(&self) -> &BigUint {
        &self.m_size
    }

    /// `|M(D)| · Π m_j! / d!` where `m_j` counts branches with `j` leaves;
    /// this is 1 exactly when branches of equal size are isomorphic.
    fn arrangement_scale(&self) -> BigRational {
        let mut prof: HashMap<u64, u64> = HashMap::new();
        for &e in &self.exponents {
            *prof.entry(e).or_insert(0) += 1;
        }
        let prof_fact: BigUint = prof.values().map(|&m| factorial(m)).product();
        rational(
            BigInt::from(self.m_size.clone() * prof_fact),
            BigInt::from(factorial(u64::from(self.d.get()))),
        )
    }

    /// Value at the uniform point: `|M(D)| / (d^k - d)`, exactly.
    pub fn uniform_value(&self) -> BigRational {
        rational(
            BigInt::from(self.m_size.clone()),
            BigInt::from(big_pow(u64::from(self.d.get()), self.total_leaves) - self.d.get()),
        )
    }

    /// Certified combinatorial cap on the supremum:
    /// `|M(D)| Π m_j! / d! · C(k; exponents)^{-1}`.
    pub fn certified_cap(&self) -> BigRational {
        self.arrangement_scale()
            / rational_int(BigInt::from(multinomial(
                self.total_leaves,
                &self.exponents,
            )))
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d.as_usize());
        let k = self.total_leaves as i32;
        let denom = 1.0 - x.iter().map(|&v| v.powi(k)).sum::<f64>();
        if denom <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut num = 0.0;
        for arr in &self.arrangements {
            let mut term = 1.0;
            for (xi, &e) in x.iter().zip(arr) {
                term *= xi.powi(e as i32);
            }
            num += term;
        }
        let scale = self.arrangement_scale().to_f64().unwrap_or(f64::NAN);
        scale * num / denom
    }

    /// Exact evaluation; `None` when the denominator vanishes (corners).
    pub fn eval_rational(&self, x: &[BigRational]) -> Option<BigRational> {
        assert_eq!(x.len(), self.d.as_usize());
        let k = self.total_leaves as i32;
        let denom = BigRational::one() - x.iter().map(|v| v.pow(k)).sum::<BigRational>();
        if denom.is_zero() {
            return None;
        }
        let mut num = BigRational::zero();
        for arr in &self.arrangements {
            let mut term = BigRational::one();
            for (xi, &e) in x.iter().zip(arr) {
                term *= xi.pow(e as i32);
            }
            num += term;
        }
        Some(self.arrangement_scale() * num / denom)
    }

    /// Balanced exponent profile: largest and smallest padded branch sizes
    /// differ by at most one.
    pub fn balanced_exponents(&self) -> bool {
        self.exponents[0] - self.exponents[self.exponents.len() - 1] <= 1
    }

    /// Exactly two nonempty branches, one of them a single leaf and the
    /// other with at least two.
    pub fn one_leaf_branch_profile(&self) -> bool {
        let nonzero: Vec<u64> = self.exponents.iter().copied().filter(|&e| e > 0).collect();
        nonzero.len() == 2 && nonzero[1] == 1 && nonzero[0] >= 2
    }

    /// Binary profile with branch sizes `(ℓ, ℓ+2)`, `ℓ >= 2`; the
    /// uniform-supremum closed form for this shape is opt-in.
    pub fn gap_two_profile(&self) -> bool {
        self.d.get() == 2 && self.exponents[1] >= 2 && self.exponents[0] == self.exponents[1] + 2
    }
}

fn distinct_permutations(values: &[u64]) -> Vec<Vec<u64>> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(values.len());
    let mut used = vec![false; values.len()];
    permute_rec(&sorted, &mut used, &mut current, &mut out);
    out
}

fn permute_rec(sorted: &[u64], used: &mut [bool], current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if current.len() == sorted.len() {
        out.push(current.clone());
        return;
    }
    let mut last: Option<u64> = None;
    for i in 0..sorted.len() {
        if used[i] || last == Some(sorted[i]) {
            continue;
        }
        last = Some(sorted[i]);
        used[i] = true;
        current.push(sorted[i]);
        permute_rec(sorted, used, current, out);
        current.pop();
        used[i] = false;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupremumStatus {
    /// Balanced profile: supremum attained at the uniform point (Muirhead).
    ClosedFormBalanced,
    /// Two nonempty branches of sizes `1` and `k-1`: supremum `1/k`,
    /// approached at the boundary but not attained.
    ClosedFormOneLeafBranch,
    /// No search was run; the value is just the certified cap.
    UpperBoundOnly,
    /// Best point found by the seeded multi-start search; a lower estimate
    /// of the supremum, never a certificate.
    NumericHeuristic,
}

impl SupremumStatus {
    pub fn tag(self) -> &'static str {
        match self {
            SupremumStatus::ClosedFormBalanced => "ClosedFormBalanced",
            SupremumStatus::ClosedFormOneLeafBranch => "ClosedFormOneLeafBranch",
            SupremumStatus::UpperBoundOnly => "UpperBoundOnly",
            SupremumStatus::NumericHeuristic => "NumericHeuristic",
        }
    }
}

#[derive(Debug, Clone)]
pub enum SupremumWitness {
    /// `x = (1/d, …, 1/d)`.
    Uniform,
    /// The limit along `x = (ε, …, ε, 1-(d-1)ε)` as `ε → 0⁺`.
    BoundaryLimit,
    /// Best simplex point found by the search.
    Point(Vec<f64>),
    /// No witness: the value is only an upper bound.
    Unlocated,
}

#[derive(Debug, Clone)]
pub enum SupremumValue {
    Exact(BigRational),
    Approx(f64),
}

impl SupremumValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            SupremumValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            SupremumValue::Approx(v) => *v,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SupremumResult {
    pub value: SupremumValue,
    pub status: SupremumStatus,
    pub witness: SupremumWitness,
    /// Certified cap from the arrangement-count bound; an exact upper bound
    /// on the supremum regardless of status.
    pub cap: BigRational,
    /// Residual uncertainty: 0 for closed forms, `cap - value` otherwise.
    pub gap_bound: f64,
}

impl SupremumResult {
    /// Exact rational upper bound on the supremum: the closed-form value
    /// when one applies, the cap otherwise.
    pub fn certified_upper(&self) -> BigRational {
        match (&self.status, &self.value) {
            (SupremumStatus::ClosedFormBalanced, SupremumValue::Exact(v))
            | (SupremumStatus::ClosedFormOneLeafBranch, SupremumValue::Exact(v)) => v.clone(),
            _ => self.cap.clone(),
        }
    }
}

/// Determines `sup Z_D` over the open simplex: exact for the balanced and
/// one-leaf-branch profiles, otherwise a heuristic search value with the
/// certified cap attached (or the cap alone when the search is disabled).
pub fn z_supremum(zf: &ZFunction, opts: &BoundsOptions) -> SupremumResult {
    let cap = zf.certified_cap();
    if zf.balanced_exponents() {
        return SupremumResult {
            value: SupremumValue::Exact(zf.uniform_value()),
            status: SupremumStatus::ClosedFormBalanced,
            witness: SupremumWitness::Uniform,
            cap,
            gap_bound: 0.0,
        };
    }
    if zf.one_leaf_branch_profile() {
        return SupremumResult {
            value: SupremumValue::Exact(rational(1, BigInt::from(zf.total_leaves))),
            status: SupremumStatus::ClosedFormOneLeafBranch,
            witness: SupremumWitness::BoundaryLimit,
            cap,
            gap_bound: 0.0,
        };
    }
    match &opts.numeric {
        Some(numeric) => {
            let (value, point) =
                simplex::maximize_on_simplex(|x| zf.eval_f64(x), zf.arity().as_usize(), numeric);
            let gap = (cap.to_f64().unwrap_or(f64::INFINITY) - value).max(0.0);
            SupremumResult {
                value: SupremumValue::Approx(value),
                status: SupremumStatus::NumericHeuristic,
                witness: SupremumWitness::Point(point),
                cap,
                gap_bound: gap,
            }
        }
        None => SupremumResult {
            value: SupremumValue::Exact(cap.clone()),
            status: SupremumStatus::UpperBoundOnly,
            witness: SupremumWitness::Unlocated,
            gap_bound: cap.to_f64().unwrap_or(f64::INFINITY),
            cap,
        },
    }
}

/// Exact rational upper bound on `sup Z_D` usable inside certified bounds,
/// honouring the opt-in gap-two closed form.
fn certified_sup_upper(zf: &ZFunction, opts: &BoundsOptions) -> BigRational {
    if zf.balanced_exponents() {
        zf.uniform_value()
    } else if zf.one_leaf_branch_profile() {
        rational(1, BigInt::from(zf.total_leaves))
    } else if opts.assume_gap_two_supremum && zf.gap_two_profile() {
        zf.uniform_value()
    } else {
        zf.certified_cap()
    }
}

// ---------------------------------------------------------------------------
// Supremum-condition certification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum SupremumCertificate {
    /// The supremum is provably attained at the uniform point.
    Proven,
    /// The search found no simplex point beating the uniform value by more
    /// than the tolerance. Never treated as a proof.
    NumericallySupported,
    /// A simplex point beats the uniform value by more than the tolerance.
    Refuted { witness: Vec<f64>, value: f64 },
}

impl SupremumCertificate {
    pub fn tag(&self) -> &'static str {
        match self {
            SupremumCertificate::Proven => "Proven",
            SupremumCertificate::NumericallySupported => "NumericallySupported",
            SupremumCertificate::Refuted { .. } => "Refuted",
        }
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, SupremumCertificate::Proven)
    }
}

/// Decides whether `sup Z_D` equals the uniform-point value
/// `|M(D)|/(d^k - d)`. Balanced trees are proven (Muirhead); the
/// one-leaf-branch profile is decided exactly; gap-two binary profiles are
/// accepted when opted in; everything else is settled heuristically.
pub fn certify_supremum_condition(
    t: &Tree,
    d: Arity,
    opts: &BoundsOptions,
) -> Result<SupremumCertificate, BoundsError> {
    let zf = z_function(t, d)?;
    let uniform = zf.uniform_value();
    if zf.balanced_exponents() {
        return Ok(SupremumCertificate::Proven);
    }
    let numeric = opts.numeric.clone().unwrap_or_default();
    if zf.one_leaf_branch_profile() {
        let sup = rational(1, BigInt::from(zf.total_leaves));
        if sup == uniform {
            return Ok(SupremumCertificate::Proven);
        }
        // The supremum exceeds the uniform value; exhibit a boundary point.
        return Ok(refute_along_boundary(&zf, &uniform, numeric.tolerance));
    }
    if opts.assume_gap_two_supremum && zf.gap_two_profile() {
        return Ok(SupremumCertificate::Proven);
    }
    if zf.certified_cap() == uniform {
        return Ok(SupremumCertificate::Proven);
    }
    let (best, point) =
        simplex::maximize_on_simplex(|x| zf.eval_f64(x), zf.arity().as_usize(), &numeric);
    let threshold = uniform.to_f64().unwrap_or(f64::INFINITY) + numeric.tolerance;
    if best > threshold {
        Ok(SupremumCertificate::Refuted {
            witness: point,
            value: best,
        })
    } else {
        Ok(SupremumCertificate::NumericallySupported)
    }
}

fn refute_along_boundary(
    zf: &ZFunction,
    uniform: &BigRational,
    tolerance: f64,
) -> SupremumCertificate {
    let dim = zf.arity().as_usize();
    let threshold = uniform.to_f64().unwrap_or(f64::INFINITY) + tolerance;
    let mut best = (f64::NEG_INFINITY, vec![0.0; dim]);
    for i in 1..=9 {
        let eps = 10f64.powi(-i);
        let mut x = vec![eps; dim];
        x[dim - 1] = 1.0 - (dim as f64 - 1.0) * eps;
        let v = zf.eval_f64(&x);
        if v > best.0 {
            best = (v, x);
        }
    }
    if best.0 > threshold {
        SupremumCertificate::Refuted {
            witness: best.1,
            value: best.0,
        }
    } else {
        SupremumCertificate::NumericallySupported
    }
}

// ---------------------------------------------------------------------------
// Closed-form inducibility values
// ---------------------------------------------------------------------------

/// Exact inducibility of the even d-ary tree with `k` leaves, via the
/// recursion `c_{ds+b} = C(d,b) c_s^{d-b} c_{s+1}^b / (d^{ds+b} - d)` with
/// `c_0 = c_1 = 1` and `I = k! c_k`.
pub fn even_inducibility(d: Arity, k: u64) -> BigRational {
    let mut memo: HashMap<u64, BigRational> = HashMap::new();
    rational_int(BigInt::from(factorial(k))) * even_coefficient(d, k, &mut memo)
}

fn even_coefficient(d: Arity, k: u64, memo: &mut HashMap<u64, BigRational>) -> BigRational {
    if k <= 1 {
        return BigRational::one();
    }
    if let Some(v) = memo.get(&k) {
        return v.clone();
    }
    let dd = u64::from(d.get());
    let s = k / dd;
    let b = k % dd;
    let small = even_coefficient(d, s, memo);
    let mut value = rational(
        BigInt::from(crate::combinatorics::binomial(dd, b)),
        BigInt::from(big_pow(dd, k) - d.get()),
    ) * small.pow((dd - b) as i32);
    if b > 0 {
        value *= even_coefficient(d, s + 1, memo).pow(b as i32);
    }
    memo.insert(k, value.clone());
    value
}

/// Exact inducibility of the complete d-ary tree of height `h`:
/// `(d^h)! Π_{i<h} (d^{d^{h-i}} - d)^{-d^i}`. Coincides with
/// [`even_inducibility`] at `k = d^h`.
pub fn complete_inducibility(d: Arity, h: u32) -> BigRational {
    let dd = u64::from(d.get());
    let leaves = dd.pow(h);
    let mut value = rational_int(BigInt::from(factorial(leaves)));
    for i in 0..h {
        let base = big_pow(dd, dd.pow(h - i)) - d.get();
        value /= rational_int(BigInt::from(base)).pow(dd.pow(i) as i32);
    }
    value
}

/// Universal lower bound `(k-1)! / (k^{k-1} - 1)` on the inducibility of
/// any tree with `k >= 2` leaves; tight for the star with `k = d` leaves.
pub fn lower_bound_star(k: u64) -> Result<BigRational, BoundsError> {
    if k < 2 {
        return Err(BoundsError::Domain(format!(
            "star bound needs k >= 2, got {k}"
        )));
    }
    Ok(rational(
        BigInt::from(factorial(k - 1)),
        BigInt::from(big_pow(k, k - 1) - 1u32),
    ))
}

/// Composition-sum denominator for the partially-balanced upper bound: the
/// total multinomial weight of vectors `(k_1..k_d)` with entries below
/// `‖D‖` summing to `‖D‖` and at least `d - r` zeros, `r` being the number
/// of nonempty branches. Equals `d^k - d` when `r = d`.
pub fn sigma(t: &Tree, d: Arity) -> Result<BigUint, BoundsError> {
    t.validate_arity(d)?;
    if t.is_empty() || t.is_leaf() {
        return Err(BoundsError::Domain("sigma needs an internal root".into()));
    }
    let k = t.leaf_count();
    let r = t.children().len();
    let min_zeros = d.as_usize() - r;
    let mut total = BigUint::zero();
    let mut parts = vec![0u64; d.as_usize()];
    sigma_rec(k, d.as_usize(), 0, k, min_zeros, &mut parts, &mut total);
    if total.is_zero() {
        return Err(BoundsError::Domain(
            "no admissible composition vector; the root needs at least two nonempty branches"
                .into(),
        ));
    }
    Ok(total)
}

fn sigma_rec(
    k: u64,
    dim: usize,
    pos: usize,
    remaining: u64,
    min_zeros: usize,
    parts: &mut [u64],
    total: &mut BigUint,
) {
    if pos == dim {
        if remaining == 0 && parts.iter().filter(|&&p| p == 0).count() >= min_zeros {
            *total += multinomial(k, parts);
        }
        return;
    }
    let hi = remaining.min(k - 1);
    for p in 0..=hi {
        parts[pos] = p;
        sigma_rec(k, dim, pos + 1, remaining - p, min_zeros, parts, total);
    }
    parts[pos] = 0;
}

// ---------------------------------------------------------------------------
// Bound aggregation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    /// The strict-even limit η itself.
    EtaLimit,
    /// Join branch-optimal hosts under a fresh root.
    BranchSplitLower,
    /// The universal `(k-1)!/(k^{k-1}-1)` floor.
    StarFloor,
    /// Sandwich for a root with d isomorphic branches (lower side).
    EqualBranchesLower,
    /// Sandwich for a root with d isomorphic branches (upper side).
    EqualBranchesUpper,
    /// Multinomial times branch bounds times a certified `sup Z` bound.
    SupremumProductUpper,
    /// Arrangement-count bound times the product of branch bounds.
    BranchProductUpper,
    /// Balanced-profile closed form for `sup Z`.
    BalancedUpper,
    /// Variant for fewer than d nonempty branches, balanced among them.
    PartialBalancedUpper,
    /// Densities never exceed one.
    TrivialOne,
}

impl BoundSource {
    pub fn tag(self) -> &'static str {
        match self {
            BoundSource::EtaLimit => "eta-limit",
            BoundSource::BranchSplitLower => "branch-split-lower",
            BoundSource::StarFloor => "star-floor",
            BoundSource::EqualBranchesLower => "equal-branches-lower",
            BoundSource::EqualBranchesUpper => "equal-branches-upper",
            BoundSource::SupremumProductUpper => "supremum-product-upper",
            BoundSource::BranchProductUpper => "branch-product-upper",
            BoundSource::BalancedUpper => "balanced-upper",
            BoundSource::PartialBalancedUpper => "partial-balanced-upper",
            BoundSource::TrivialOne => "trivial-one",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactCertificate {
    /// At most two leaves: a single shape per size, density one.
    TwoLeaf,
    /// Binary caterpillars are the unique inducibility-one family.
    Caterpillar,
    /// Recognized even tree; closed-form recursion value.
    EvenTree,
    /// Balanced with recursively exact branches.
    BalancedRecursive,
    /// Uniform-supremum condition proven with recursively exact branches.
    SupremumCondition,
}

impl ExactCertificate {
    pub fn tag(self) -> &'static str {
        match self {
            ExactCertificate::TwoLeaf => "TwoLeaf",
            ExactCertificate::Caterpillar => "Caterpillar",
            ExactCertificate::EvenTree => "EvenTree",
            ExactCertificate::BalancedRecursive => "BalancedRecursive",
            ExactCertificate::SupremumCondition => "SupremumCondition",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Bound {
    pub value: BigRational,
    pub source: BoundSource,
}

/// Aggregated lower/upper bounds on the inducibility of one tree, with an
/// exactness certificate when a documented case applies.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub tree: Tree,
    pub d: Arity,
    pub eta: BigRational,
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
    pub exact: Option<(BigRational, ExactCertificate)>,
}

impl BoundReport {
    pub fn best_lower(&self) -> BigRational {
        if let Some((v, _)) = &self.exact {
            return v.clone();
        }
        self.lower
            .iter()
            .map(|b| b.value.clone())
            .max()
            .expect("eta is always present")
    }

    pub fn best_upper(&self) -> BigRational {
        if let Some((v, _)) = &self.exact {
            return v.clone();
        }
        self.upper
            .iter()
            .map(|b| b.value.clone())
            .min()
            .expect("trivial bound is always present")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tree": self.tree.canon_key(),
            "d": self.d.get(),
            "leaves": self.tree.leaf_count(),
            "eta": rational_json(&self.eta),
            "exact": self.exact.as_ref().map(|(v, c)| json!({
                "value": rational_json(v),
                "certificate": c.tag(),
            })),
            "lower": self.lower.iter().map(bound_json).collect::<Vec<_>>(),
            "upper": self.upper.iter().map(bound_json).collect::<Vec<_>>(),
            "best_lower": rational_json(&self.best_lower()),
            "best_upper": rational_json(&self.best_upper()),
        })
    }
}

pub fn rational_json(r: &BigRational) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
}

fn bound_json(b: &Bound) -> Value {
    json!({"value": rational_json(&b.value), "source": b.source.tag()})
}

struct NodeBounds {
    eta: BigRational,
    lower: BigRational,
    upper: BigRational,
    exact: Option<(BigRational, ExactCertificate)>,
    /// Exact and equal to η: the precondition branches must satisfy for the
    /// recursive exactness chain.
    chain_ok: bool,
}

/// Memoizing evaluator for all bound operations at a fixed arity.
pub struct BoundsEngine {
    d: Arity,
    opts: BoundsOptions,
    memo: HashMap<Tree, Rc<NodeBounds>>,
    eta_memo: HashMap<Tree, BigRational>,
}

impl BoundsEngine {
    pub fn new(d: Arity, opts: BoundsOptions) -> Self {
        BoundsEngine {
            d,
            opts,
            memo: HashMap::new(),
            eta_memo: HashMap::new(),
        }
    }

    pub fn arity(&self) -> Arity {
        self.d
    }

    pub fn eta(&mut self, t: &Tree) -> BigRational {
        eta_rec(t, self.d, &mut self.eta_memo)
    }

    /// Best certified upper bound on the inducibility of `t`.
    pub fn upper(&mut self, t: &Tree) -> Result<BigRational, BoundsError> {
        Ok(self.bounds_for(t)?.upper.clone())
    }

    /// Best certified lower bound on the inducibility of `t`.
    pub fn lower(&mut self, t: &Tree) -> Result<BigRational, BoundsError> {
        Ok(self.bounds_for(t)?.lower.clone())
    }

    /// Exact inducibility when a documented certificate applies.
    pub fn exact(
        &mut self,
        t: &Tree,
    ) -> Result<Option<(BigRational, ExactCertificate)>, BoundsError> {
        Ok(self.bounds_for(t)?.exact.clone())
    }

    /// Upper bound via the simplex-supremum product: multinomial times the
    /// branch upper bounds times a certified upper bound on `sup Z`.
    pub fn supremum_product_upper(&mut self, t: &Tree) -> Result<BigRational, BoundsError> {
        let zf = z_function(t, self.d)?;
        let sup = certified_sup_upper(&zf, &self.opts);
        let base = rational_int(BigInt::from(multinomial(t.leaf_count(), zf.exponents())));
        Ok(base * self.branch_upper_product(t)? * sup)
    }

    /// Upper bound via arrangement counting alone:
    /// `|M(D)| Π m_j!/d! · Π upper(D_i)`; reduces to the plain product of
    /// branch bounds when branches of equal size are isomorphic.
    pub fn branch_product_upper(&mut self, t: &Tree) -> Result<BigRational, BoundsError> {
        let zf = z_function(t, self.d)?;
        Ok(zf.arrangement_scale() * self.branch_upper_product(t)?)
    }

    /// Balanced upper bound `|M| C(k; sizes) / (d^k - d) · Π upper(D_i)`,
    /// or the composition-sum variant when fewer than `d` branches are
    /// nonempty but their sizes still differ by at most one.
    pub fn balanced_upper(&mut self, t: &Tree) -> Result<BigRational, BoundsError> {
        t.validate_arity(self.d)?;
        if t.leaf_count() < 2 {
            return Err(BoundsError::Domain(
                "balanced bound needs an internal root".into(),
            ));
        }
        let sig = branch_signature(t, self.d);
        let exps = sig.exponents(self.d);
        let k = t.leaf_count();
        let denom: BigUint = if is_balanced(t, self.d) {
            big_pow(u64::from(self.d.get()), k) - self.d.get()
        } else if nonempty_balanced(t) && t.children().len() < self.d.as_usize() {
            sigma(t, self.d)?
        } else {
            return Err(BoundsError::Domain(
                "tree is neither balanced nor nonempty-balanced with spare arity".into(),
            ));
        };
        let scale = rational(
            BigInt::from(sig.m_size().clone() * multinomial(k, &exps)),
            BigInt::from(denom),
        );
        Ok(scale * self.branch_upper_product(t)?)
    }

    /// Lower bound from joining branch-optimal hosts under a fresh root:
    /// `C(k; sizes) k^{-k} Π ‖D_i‖^{‖D_i‖} · Π lower(D_i)`, with `0^0 = 1`.
    pub fn branch_split_lower(&mut self, t: &Tree) -> Result<BigRational, BoundsError> {
        t.validate_arity(self.d)?;
        if t.leaf_count() < 2 {
            return Err(BoundsError::Domain(
                "branch-split bound needs an internal root".into(),
            ));
        }
        let k = t.leaf_count();
        let sizes: Vec<u64> = t.children().iter().map(Tree::leaf_count).collect();
        let mut padded = sizes.clone();
        padded.resize(self.d.as_usize(), 0);
        let mut value = rational(
            BigInt::from(multinomial(k, &padded)),
            BigInt::from(big_pow(k, k)),
        );
        for (child, &l) in t.children().iter().zip(&sizes) {
            value *= rational_int(BigInt::from(big_pow(l, l)));
            value *= self.bounds_for(child)?.lower.clone();
        }
        Ok(value)
    }

    /// Two-sided sandwich when the root has `d` isomorphic branches:
    /// `k!/d^k (I'/ℓ!)^d <= I <= k!/(d^k - d) (I'/ℓ!)^d`, the branch value
    /// replaced by its certified lower/upper bound on each side.
    pub fn equal_branches_bounds(
        &mut self,
        t: &Tree,
    ) -> Result<Option<(BigRational, BigRational)>, BoundsError> {
        t.validate_arity(self.d)?;
        let children = t.children();
        if children.len() != self.d.as_usize() || children.iter().any(|c| c != &children[0]) {
            return Ok(None);
        }
        let k = t.leaf_count();
        let branch = &children[0].clone();
        let l = branch.leaf_count();
        let nb = self.bounds_for(branch)?;
        let dd = u64::from(self.d.get());
        let per_branch_fact = rational_int(BigInt::from(factorial(l)));
        let lower = rational(BigInt::from(factorial(k)), BigInt::from(big_pow(dd, k)))
            * (nb.lower.clone() / per_branch_fact.clone()).pow(self.d.get() as i32);
        let upper = rational(
            BigInt::from(factorial(k)),
            BigInt::from(big_pow(dd, k) - self.d.get()),
        ) * (nb.upper.clone() / per_branch_fact).pow(self.d.get() as i32);
        Ok(Some((lower, upper)))
    }

    pub fn certify(&mut self, t: &Tree) -> Result<SupremumCertificate, BoundsError> {
        certify_supremum_condition(t, self.d, &self.opts)
    }

    /// Full bound report for one tree.
    pub fn report(&mut self, t: &Tree) -> Result<BoundReport, BoundsError> {
        t.validate_arity(self.d)?;
        if t.is_empty() {
            return Err(BoundsError::Domain("report needs a nonempty tree".into()));
        }
        let nb = self.bounds_for(t)?;
        let eta = nb.eta.clone();
        let exact = nb.exact.clone();
        let mut lower = vec![Bound {
            value: eta.clone(),
            source: BoundSource::EtaLimit,
        }];
        let mut upper = vec![Bound {
            value: BigRational::one(),
            source: BoundSource::TrivialOne,
        }];
        if t.leaf_count() >= 2 {
            lower.push(Bound {
                value: self.branch_split_lower(t)?,
                source: BoundSource::BranchSplitLower,
            });
            lower.push(Bound {
                value: lower_bound_star(t.leaf_count())?,
                source: BoundSource::StarFloor,
            });
            upper.push(Bound {
                value: self.supremum_product_upper(t)?,
                source: BoundSource::SupremumProductUpper,
            });
            upper.push(Bound {
                value: self.branch_product_upper(t)?,
                source: BoundSource::BranchProductUpper,
            });
            if is_balanced(t, self.d) {
                upper.push(Bound {
                    value: self.balanced_upper(t)?,
                    source: BoundSource::BalancedUpper,
                });
            } else if nonempty_balanced(t) && t.children().len() < self.d.as_usize() {
                upper.push(Bound {
                    value: self.balanced_upper(t)?,
                    source: BoundSource::PartialBalancedUpper,
                });
            }
            if let Some((lo, hi)) = self.equal_branches_bounds(t)? {
                lower.push(Bound {
                    value: lo,
                    source: BoundSource::EqualBranchesLower,
                });
                upper.push(Bound {
                    value: hi,
                    source: BoundSource::EqualBranchesUpper,
                });
            }
        }
        Ok(BoundReport {
            tree: t.clone(),
            d: self.d,
            eta,
            lower,
            upper,
            exact,
        })
    }

    fn branch_upper_product(&mut self, t: &Tree) -> Result<BigRational, BoundsError> {
        let mut acc = BigRational::one();
        for child in t.children() {
            acc *= self.bounds_for(child)?.upper.clone();
        }
        Ok(acc)
    }

    fn bounds_for(&mut self, t: &Tree) -> Result<Rc<NodeBounds>, BoundsError> {
        if let Some(nb) = self.memo.get(t) {
            return Ok(nb.clone());
        }
        let nb = Rc::new(self.compute_bounds(t)?);
        self.memo.insert(t.clone(), nb.clone());
        Ok(nb)
    }

    fn compute_bounds(&mut self, t: &Tree) -> Result<NodeBounds, BoundsError> {
        let k = t.leaf_count();
        let eta = self.eta(t);
        if k <= 2 {
            // One shape per size: density is identically one.
            return Ok(NodeBounds {
                eta: eta.clone(),
                lower: BigRational::one(),
                upper: BigRational::one(),
                exact: Some((BigRational::one(), ExactCertificate::TwoLeaf)),
                chain_ok: eta.is_one(),
            });
        }
        let mut chain = true;
        for child in t.children() {
            chain &= self.bounds_for(child)?.chain_ok;
        }
        let exact: Option<(BigRational, ExactCertificate)> = if t.is_binary_caterpillar() {
            Some((BigRational::one(), ExactCertificate::Caterpillar))
        } else if *t == even_tree(self.d, k) {
            Some((even_inducibility(self.d, k), ExactCertificate::EvenTree))
        } else if chain && self.certify(t)?.is_proven() {
            let cert = if is_balanced(t, self.d) {
                ExactCertificate::BalancedRecursive
            } else {
                ExactCertificate::SupremumCondition
            };
            Some((eta.clone(), cert))
        } else {
            None
        };
        let (lower, upper) = match &exact {
            Some((v, _)) => (v.clone(), v.clone()),
            None => {
                let mut lo = eta.clone();
                lo = lo.max(self.branch_split_lower(t)?);
                lo = lo.max(lower_bound_star(k)?);
                let mut hi = BigRational::one();
                hi = hi.min(self.supremum_product_upper(t)?);
                hi = hi.min(self.branch_product_upper(t)?);
                if is_balanced(t, self.d)
                    || (nonempty_balanced(t) && t.children().len() < self.d.as_usize())
                {
                    hi = hi.min(self.balanced_upper(t)?);
                }
                if let Some((el, eu)) = self.equal_branches_bounds(t)? {
                    lo = lo.max(el);
                    hi = hi.min(eu);
                }
                (lo, hi)
            }
        };
        let chain_ok = exact.as_ref().is_some_and(|(v, _)| *v == eta);
        Ok(NodeBounds {
            eta,
            lower,
            upper,
            exact,
            chain_ok,
        })
    }
}

/// True when the nonempty branch sizes pairwise differ by at most one.
fn nonempty_balanced(t: &Tree) -> bool {
    let sizes: Vec<u64> = t.children().iter().map(Tree::leaf_count).collect();
    match (sizes.iter().max(), sizes.iter().min()) {
        (Some(max), Some(min)) => max - min <= 1,
        _ => false,
    }
}

/// One-shot [`BoundReport`] for a tree.
pub fn inducibility_report(
    t: &Tree,
    d: Arity,
    opts: &BoundsOptions,
) -> Result<BoundReport, BoundsError> {
    BoundsEngine::new(d, opts.clone()).report(t)
}
