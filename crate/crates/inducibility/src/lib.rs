//! Exact arithmetic for leaf-induced subtrees of rooted d-ary trees.
//!
//! A subset of leaves of a rooted tree induces a smaller tree: take the
//! minimal spanning subtree and suppress every vertex with a single child.
//! For a pattern `D` and a host `T`, the copy count `c(D,T)` is the number
//! of leaf subsets of `T` inducing a tree isomorphic to `D`, and the
//! density is `c(D,T) / C(‖T‖,‖D‖)` where `‖·‖` counts leaves. The
//! inducibility of `D` is the limit of the maximum density over d-ary
//! hosts as the host size grows.
//!
//! Everything that feeds a comparison is computed in exact rational
//! arithmetic ([`num::BigRational`]); floating point appears only in the
//! heuristic simplex search for suprema that have no closed form, and such
//! values are never used as certificates.
//!
//! The crate is organised as:
//! * [`tree`] — canonical tree representation, parsing, generators and
//!   exhaustive enumeration of isomorphism classes,
//! * [`counting`] — copy counts and densities via the branch recursion,
//!   with a brute-force subset oracle,
//! * [`bounds`] — the strict-even limit `η_d`, the simplex function `Z_D`
//!   and every closed-form or certified bound on the inducibility,
//! * [`search`] — exhaustive maximum-density search, convergence tables
//!   and the even-tree extremality check.

pub mod bounds;
pub mod combinatorics;
pub mod counting;
pub mod search;
pub mod tree;

pub use bounds::{
    certify_supremum_condition, complete_inducibility, eta, even_inducibility, inducibility_report,
    lower_bound_star, phi, sigma, z_function, z_supremum, Bound, BoundReport, BoundSource,
    BoundsEngine, BoundsError, BoundsOptions, ExactCertificate, NumericOptions,
    SupremumCertificate, SupremumResult, SupremumStatus, SupremumValue, SupremumWitness, ZFunction,
};
pub use counting::{
    branch_signature, count_copies, count_copies_bruteforce, density, BranchSignature, CopyCounter,
    CountError, PatternTable, DEFAULT_SUBSET_CAP,
};
pub use search::{
    conjecture_check, convergence_csv, convergence_table, max_density, sandwich_check,
    ConjectureReport, ConjectureRow, ConvergenceRow, SandwichOutcome, SandwichViolation,
    SearchCaps, SearchError, SearchResult, ViolationSide,
};
pub use tree::{
    branches, canonicalize, caterpillar, complete_tree, enumerate_trees, even_tree, induce_subtree,
    is_balanced, is_isomorphic, parse_tree, serialize, strict_even_tree, Arity, Tree, TreeError,
};

/// Rational type used for every exact quantity: densities, η values, bounds.
pub type Rational = num::BigRational;
