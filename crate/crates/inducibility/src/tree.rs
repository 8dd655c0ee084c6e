//! Canonical rooted d-ary trees: representation, text format, isomorphism,
//! generators and exhaustive enumeration.
//!
//! Size is always measured in leaves. A tree is *d-ary* when every internal
//! vertex has between 2 and `d` children, and *strictly d-ary* when every
//! internal vertex has exactly `d`. The empty tree exists only as a padding
//! branch at API boundaries ([`branches`]); it is never stored inside
//! another tree.
//!
//! Text format: `*` is a leaf, `-` is the empty tree (top level only), and
//! an internal vertex is a parenthesised comma-separated list of children,
//! e.g. `((*,*),*)`. Children are kept sorted by `(leaf_count, canon_key)`,
//! so structural equality coincides with rooted-tree isomorphism and
//! [`serialize`] emits the same string for isomorphic trees.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arity violation: internal vertex with {children} children (allowed 2..={d})")]
    Arity { children: usize, d: u32 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("leaf index {index} out of range for a tree with {leaf_count} leaves")]
    LeafIndex { index: u64, leaf_count: u64 },
}

/// Maximum number of children per internal vertex. Always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arity(u32);

impl Arity {
    pub fn new(d: u32) -> Result<Self, TreeError> {
        if d < 2 {
            return Err(TreeError::Domain(format!(
                "arity must be at least 2, got {d}"
            )));
        }
        Ok(Arity(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
pub struct InternalNode {
    children: Vec<Tree>,
    leaf_count: u64,
    key: Box<str>,
}

/// A canonical rooted tree (possibly empty).
///
/// Cloning is cheap: internal vertices are shared behind an [`Arc`].
#[derive(Debug, Clone)]
pub enum Tree {
    Empty,
    Leaf,
    Internal(Arc<InternalNode>),
}

impl Tree {
    /// Builds an internal vertex, sorting the children into canonical order.
    ///
    /// Panics on fewer than two children or on an empty child; those are
    /// structural invariants, not user input ([`parse_tree`] validates
    /// before constructing).
    pub fn internal(mut children: Vec<Tree>) -> Tree {
        assert!(
            children.len() >= 2,
            "internal vertex needs at least two children"
        );
        assert!(
            children.iter().all(|c| !c.is_empty()),
            "the empty tree cannot be a stored child"
        );
        children.sort();
        let leaf_count = children.iter().map(Tree::leaf_count).sum();
        let mut key = String::with_capacity(2 + children.len() * 2);
        key.push('(');
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                key.push(',');
            }
            key.push_str(c.canon_key());
        }
        key.push(')');
        Tree::Internal(Arc::new(InternalNode {
            children,
            leaf_count,
            key: key.into(),
        }))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Tree::Empty)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf)
    }

    pub fn leaf_count(&self) -> u64 {
        match self {
            Tree::Empty => 0,
            Tree::Leaf => 1,
            Tree::Internal(n) => n.leaf_count,
        }
    }

    /// Canonical key: byte-equal iff the trees are isomorphic as rooted trees.
    /// Identical to the [`serialize`] output.
    pub fn canon_key(&self) -> &str {
        match self {
            Tree::Empty => "-",
            Tree::Leaf => "*",
            Tree::Internal(n) => &n.key,
        }
    }

    /// Children in canonical order; empty slice for leaves and the empty tree.
    pub fn children(&self) -> &[Tree] {
        match self {
            Tree::Internal(n) => &n.children,
            _ => &[],
        }
    }

    /// Checks the arity bound at every internal vertex.
    pub fn validate_arity(&self, d: Arity) -> Result<(), TreeError> {
        match self {
            Tree::Internal(n) => {
                if n.children.len() > d.as_usize() {
                    return Err(TreeError::Arity {
                        children: n.children.len(),
                        d: d.get(),
                    });
                }
                n.children.iter().try_for_each(|c| c.validate_arity(d))
            }
            _ => Ok(()),
        }
    }

    /// True when every internal vertex has exactly `d` children.
    pub fn is_strictly_d_ary(&self, d: Arity) -> bool {
        match self {
            Tree::Internal(n) => {
                n.children.len() == d.as_usize()
                    && n.children.iter().all(|c| c.is_strictly_d_ary(d))
            }
            _ => true,
        }
    }

    /// True when the tree is a binary caterpillar: every internal vertex has
    /// exactly two children, at most one of them internal. Leaves and the
    /// two-leaf tree count.
    pub fn is_binary_caterpillar(&self) -> bool {
        match self {
            Tree::Empty => false,
            Tree::Leaf => true,
            Tree::Internal(n) => {
                n.children.len() == 2
                    && n.children.iter().filter(|c| !c.is_leaf()).count() <= 1
                    && n.children.iter().all(Tree::is_binary_caterpillar)
            }
        }
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.canon_key() == other.canon_key()
    }
}

impl Eq for Tree {}

impl std::hash::Hash for Tree {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canon_key().hash(state);
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.leaf_count()
            .cmp(&other.leaf_count())
            .then_with(|| self.canon_key().cmp(other.canon_key()))
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canon_key())
    }
}

/// Parses the bracket format and validates the arity bound `d`.
///
/// Grammar: `tree := "*" | "-" | "(" tree ("," tree)+ ")"`, with `-` only
/// allowed as the whole input. ASCII whitespace between tokens is ignored.
pub fn parse_tree(text: &str, d: Arity) -> Result<Tree, TreeError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    skip_ws(bytes, &mut pos);
    if pos < bytes.len() && bytes[pos] == b'-' {
        pos += 1;
        skip_ws(bytes, &mut pos);
        return if pos == bytes.len() {
            Ok(Tree::Empty)
        } else {
            Err(TreeError::Syntax {
                pos,
                msg: "trailing input after empty tree".into(),
            })
        };
    }
    let tree = parse_node(bytes, &mut pos, d, 0)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(TreeError::Syntax {
            pos,
            msg: "trailing input".into(),
        });
    }
    Ok(tree)
}

// Bounds the parser's recursion so that arbitrarily deep input is an error
// instead of a stack overflow.
const MAX_PARSE_DEPTH: usize = 4096;

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_node(bytes: &[u8], pos: &mut usize, d: Arity, depth: usize) -> Result<Tree, TreeError> {
    if depth > MAX_PARSE_DEPTH {
        return Err(TreeError::Syntax {
            pos: *pos,
            msg: format!("nesting deeper than {MAX_PARSE_DEPTH}"),
        });
    }
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'*') => {
            *pos += 1;
            Ok(Tree::Leaf)
        }
        Some(b'(') => {
            *pos += 1;
            let mut children = vec![parse_node(bytes, pos, d, depth + 1)?];
            loop {
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    Some(b',') => {
                        *pos += 1;
                        children.push(parse_node(bytes, pos, d, depth + 1)?);
                    }
                    Some(b')') => {
                        *pos += 1;
                        break;
                    }
                    _ => {
                        return Err(TreeError::Syntax {
                            pos: *pos,
                            msg: "expected ',' or ')'".into(),
                        })
                    }
                }
            }
            if children.len() < 2 || children.len() > d.as_usize() {
                return Err(TreeError::Arity {
                    children: children.len(),
                    d: d.get(),
                });
            }
            Ok(Tree::internal(children))
        }
        Some(b'-') => Err(TreeError::Syntax {
            pos: *pos,
            msg: "empty tree only allowed at top level".into(),
        }),
        _ => Err(TreeError::Syntax {
            pos: *pos,
            msg: "expected '*' or '('".into(),
        }),
    }
}

/// Canonical text form; isomorphic trees serialize identically and the
/// output round-trips through [`parse_tree`].
pub fn serialize(t: &Tree) -> String {
    t.canon_key().to_owned()
}

/// Rebuilds the tree bottom-up with children in canonical order.
///
/// All construction paths already canonicalize, so this is the identity on
/// any reachable [`Tree`]; it exists as the explicit normalisation point
/// and is idempotent by construction.
pub fn canonicalize(t: &Tree) -> Tree {
    match t {
        Tree::Empty => Tree::Empty,
        Tree::Leaf => Tree::Leaf,
        Tree::Internal(n) => Tree::internal(n.children.iter().map(canonicalize).collect()),
    }
}

/// Root-preserving isomorphism test; equivalent to canonical-key equality.
pub fn is_isomorphic(a: &Tree, b: &Tree) -> bool {
    a == b
}

/// The even d-ary tree with `k` leaves: a star for `k <= d`, otherwise a
/// root joining `d-b` copies of the even tree with `s` leaves and `b`
/// copies of the one with `s+1`, where `k = d·s + b`. `k = 0` gives the
/// empty tree.
pub fn even_tree(d: Arity, k: u64) -> Tree {
    match k {
        0 => Tree::Empty,
        1 => Tree::Leaf,
        _ if k <= d.get() as u64 => Tree::internal(vec![Tree::Leaf; k as usize]),
        _ => {
            let dd = d.get() as u64;
            let s = k / dd;
            let b = k % dd;
            let small = even_tree(d, s);
            let mut children = vec![small; (dd - b) as usize];
            if b > 0 {
                let big = even_tree(d, s + 1);
                children.extend(vec![big; b as usize]);
            }
            Tree::internal(children)
        }
    }
}

/// The strictly d-ary analogue of even trees, indexed so that the tree has
/// `(d-1)·n + 1` leaves: index 0 is a single leaf, and index `n` joins
/// `d-b` copies of index `s` and `b` copies of index `s+1` where
/// `n - 1 = d·s + b`.
pub fn strict_even_tree(d: Arity, n: u64) -> Tree {
    if n == 0 {
        return Tree::Leaf;
    }
    let (s, b) = strict_branch_split(d, n);
    let dd = d.get() as u64;
    let small = strict_even_tree(d, s);
    let mut children = vec![small; (dd - b) as usize];
    if b > 0 {
        let big = strict_even_tree(d, s + 1);
        children.extend(vec![big; b as usize]);
    }
    Tree::internal(children)
}

/// Branch indices `(s, b)` of the strict even tree: `d-b` branches of index
/// `s` and `b` branches of index `s+1`.
pub fn strict_branch_split(d: Arity, n: u64) -> (u64, u64) {
    assert!(n > 0);
    let dd = d.get() as u64;
    ((n - 1) / dd, (n - 1) % dd)
}

/// The strictly d-ary tree with all `d^h` leaves at depth `h`.
pub fn complete_tree(d: Arity, h: u32) -> Tree {
    if h == 0 {
        return Tree::Leaf;
    }
    let sub = complete_tree(d, h - 1);
    Tree::internal(vec![sub; d.as_usize()])
}

/// The binary caterpillar with `k >= 1` leaves: internal vertices form a
/// path rooted at one end.
pub fn caterpillar(k: u64) -> Tree {
    assert!(k >= 1);
    let mut t = Tree::Leaf;
    for _ in 1..k {
        t = Tree::internal(vec![Tree::Leaf, t]);
    }
    t
}

/// The root's children padded with empty trees to length `d`; a leaf has
/// `d` empty branches. The input must be nonempty.
pub fn branches(t: &Tree, d: Arity) -> Vec<Tree> {
    assert!(!t.is_empty(), "the empty tree has no branch decomposition");
    let mut out = t.children().to_vec();
    out.resize(d.as_usize(), Tree::Empty);
    out
}

/// True when the padded branch leaf counts pairwise differ by at most one.
/// Such a tree is either a star or has root degree `d`.
pub fn is_balanced(t: &Tree, d: Arity) -> bool {
    let sizes: Vec<u64> = branches(t, d).iter().map(Tree::leaf_count).collect();
    let max = *sizes.iter().max().expect("d >= 2");
    let min = *sizes.iter().min().expect("d >= 2");
    max - min <= 1
}

/// Leaf-induced subtree: the minimal subtree spanning the selected leaves
/// with all single-child vertices suppressed. Leaves are addressed by their
/// 0-based position in depth-first order on the canonical form; duplicates
/// are ignored.
pub fn induce_subtree(t: &Tree, leaves: &[u64]) -> Result<Tree, TreeError> {
    if t.is_empty() {
        return Err(TreeError::Domain(
            "cannot induce inside the empty tree".into(),
        ));
    }
    let mut sel: Vec<u64> = leaves.to_vec();
    sel.sort_unstable();
    sel.dedup();
    if sel.is_empty() {
        return Err(TreeError::Domain("leaf selection is empty".into()));
    }
    let total = t.leaf_count();
    if let Some(&bad) = sel.iter().find(|&&i| i >= total) {
        return Err(TreeError::LeafIndex {
            index: bad,
            leaf_count: total,
        });
    }
    Ok(induce_rec(t, &sel, 0).expect("nonempty selection induces a tree"))
}

/// `sel` holds global leaf indices, sorted; `offset` is the index of this
/// subtree's first leaf. Returns `None` when no selected leaf lies here.
fn induce_rec(t: &Tree, sel: &[u64], offset: u64) -> Option<Tree> {
    if sel.is_empty() {
        return None;
    }
    match t {
        Tree::Empty => None,
        Tree::Leaf => Some(Tree::Leaf),
        Tree::Internal(n) => {
            let mut induced: Vec<Tree> = Vec::new();
            let mut child_start = offset;
            let mut rest = sel;
            for c in &n.children {
                let child_end = child_start + c.leaf_count();
                let split = rest.partition_point(|&i| i < child_end);
                let (here, beyond) = rest.split_at(split);
                if let Some(sub) = induce_rec(c, here, child_start) {
                    induced.push(sub);
                }
                rest = beyond;
                child_start = child_end;
            }
            match induced.len() {
                0 => None,
                // A single occupied branch: this vertex is suppressed.
                1 => induced.pop(),
                _ => Some(Tree::internal(induced)),
            }
        }
    }
}

/// Memoizing enumerator of isomorphism classes of d-ary trees by leaf count.
///
/// Classes for each `(n, strict)` level are built once, sorted by canonical
/// key, and shared; a tree with `n` leaves is a root joining a multiset of
/// 2..=d smaller classes (exactly d in strict mode), so distinct multisets
/// give distinct classes and no dedup pass is needed.
pub struct TreeEnumerator {
    d: Arity,
    cache: HashMap<(u64, bool), Arc<Vec<Tree>>>,
}

impl TreeEnumerator {
    pub fn new(d: Arity) -> Self {
        TreeEnumerator {
            d,
            cache: HashMap::new(),
        }
    }

    pub fn arity(&self) -> Arity {
        self.d
    }

    /// All isomorphism classes with exactly `n` leaves, in canonical-key
    /// order. Strict mode requires `n ≡ 1 (mod d-1)`.
    pub fn classes(&mut self, n: u64, strict: bool) -> Result<Arc<Vec<Tree>>, TreeError> {
        if n == 0 {
            return Err(TreeError::Domain("leaf count must be at least 1".into()));
        }
        let step = (self.d.get() - 1) as u64;
        if strict && n % step != 1 % step {
            return Err(TreeError::Domain(format!(
                "no strictly {}-ary tree has {} leaves (need n ≡ 1 mod {})",
                self.d, n, step
            )));
        }
        if let Some(v) = self.cache.get(&(n, strict)) {
            return Ok(v.clone());
        }
        let mut out: Vec<Tree> = Vec::new();
        if n == 1 {
            out.push(Tree::Leaf);
        } else {
            let d = self.d.as_usize();
            let arities: Vec<usize> = if strict { vec![d] } else { (2..=d).collect() };
            for r in arities {
                let mut parts = Vec::with_capacity(r);
                self.emit_partitions(n, r, 1, strict, &mut parts, &mut out)?;
            }
        }
        out.sort_by(|a, b| a.canon_key().cmp(b.canon_key()));
        let shared = Arc::new(out);
        self.cache.insert((n, strict), shared.clone());
        Ok(shared)
    }

    /// Ascending partitions of `n` into exactly `r` parts, each at least
    /// `min` (and of strict-compatible size in strict mode); for each
    /// partition, emits every multiset of classes with those sizes.
    fn emit_partitions(
        &mut self,
        n: u64,
        r: usize,
        min: u64,
        strict: bool,
        parts: &mut Vec<u64>,
        out: &mut Vec<Tree>,
    ) -> Result<(), TreeError> {
        if r == 1 {
            if n >= min && (!strict || self.strict_size_ok(n)) {
                parts.push(n);
                self.emit_choices(parts, strict, out)?;
                parts.pop();
            }
            return Ok(());
        }
        let mut p = min;
        while p * (r as u64) <= n {
            if !strict || self.strict_size_ok(p) {
                parts.push(p);
                self.emit_partitions(n - p, r - 1, p, strict, parts, out)?;
                parts.pop();
            }
            p += 1;
        }
        Ok(())
    }

    fn strict_size_ok(&self, n: u64) -> bool {
        let step = (self.d.get() - 1) as u64;
        n % step == 1 % step
    }

    /// For the size profile in `parts` (ascending), walks every
    /// non-decreasing choice of classes within each equal-size run.
    fn emit_choices(
        &mut self,
        parts: &[u64],
        strict: bool,
        out: &mut Vec<Tree>,
    ) -> Result<(), TreeError> {
        let mut runs: Vec<(Arc<Vec<Tree>>, usize)> = Vec::new();
        let mut i = 0;
        while i < parts.len() {
            let j = parts[i..].iter().take_while(|&&p| p == parts[i]).count();
            runs.push((self.classes(parts[i], strict)?, j));
            i += j;
        }
        let mut children: Vec<Tree> = Vec::with_capacity(parts.len());
        emit_runs(&runs, 0, &mut children, out);
        Ok(())
    }
}

fn emit_runs(
    runs: &[(Arc<Vec<Tree>>, usize)],
    run_idx: usize,
    children: &mut Vec<Tree>,
    out: &mut Vec<Tree>,
) {
    if run_idx == runs.len() {
        out.push(Tree::internal(children.clone()));
        return;
    }
    let (classes, count) = &runs[run_idx];
    let mut pick = vec![0usize; *count];
    emit_multiset(classes, &mut pick, 0, 0, runs, run_idx, children, out);
}

/// Non-decreasing index tuples into `classes`, one tree per slot.
#[allow(clippy::too_many_arguments)]
fn emit_multiset(
    classes: &Arc<Vec<Tree>>,
    pick: &mut [usize],
    slot: usize,
    min_idx: usize,
    runs: &[(Arc<Vec<Tree>>, usize)],
    run_idx: usize,
    children: &mut Vec<Tree>,
    out: &mut Vec<Tree>,
) {
    if slot == pick.len() {
        let added = pick.len();
        for &idx in pick.iter() {
            children.push(classes[idx].clone());
        }
        emit_runs(runs, run_idx + 1, children, out);
        children.truncate(children.len() - added);
        return;
    }
    for idx in min_idx..classes.len() {
        pick[slot] = idx;
        emit_multiset(classes, pick, slot + 1, idx, runs, run_idx, children, out);
    }
}

/// Streams every isomorphism class of d-ary trees with `n` leaves exactly
/// once, in canonical-key order. Strict mode restricts to strictly d-ary
/// trees and requires `n ≡ 1 (mod d-1)`.
pub fn enumerate_trees(
    d: Arity,
    n: u64,
    strict: bool,
) -> Result<impl Iterator<Item = Tree>, TreeError> {
    let mut enumerator = TreeEnumerator::new(d);
    let classes = enumerator.classes(n, strict)?;
    Ok(classes.iter().cloned().collect::<Vec<_>>().into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u32) -> Arity {
        Arity::new(n).unwrap()
    }

    #[test]
    fn parse_and_serialize_round_trip() {
        let cherry = parse_tree("(*,*)", d(2)).unwrap();
        assert_eq!(serialize(&cherry), "(*,*)");
        assert_eq!(cherry.leaf_count(), 2);

        let e9 = parse_tree("((*,*,*),(*,*,*),(*,*,*))", d(3)).unwrap();
        assert_eq!(e9, even_tree(d(3), 9));
        assert_eq!(e9, complete_tree(d(3), 2));

        assert_eq!(parse_tree("-", d(2)).unwrap(), Tree::Empty);
        assert_eq!(serialize(&Tree::Empty), "-");
    }

    #[test]
    fn parse_rejects_overdeep_nesting() {
        let mut text = String::new();
        for _ in 0..10_000 {
            text.push('(');
        }
        text.push('*');
        assert!(matches!(parse_tree(&text, d(2)), Err(TreeError::Syntax { .. })));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            parse_tree("(*,*,*,*)", d(3)),
            Err(TreeError::Arity { children: 4, d: 3 })
        ));
        assert!(matches!(
            parse_tree("(*)", d(3)),
            Err(TreeError::Arity { children: 1, .. })
        ));
        assert!(matches!(
            parse_tree("(*,", d(2)),
            Err(TreeError::Syntax { .. })
        ));
        assert!(matches!(
            parse_tree("(*,-)", d(2)),
            Err(TreeError::Syntax { .. })
        ));
        assert!(matches!(
            parse_tree("", d(2)),
            Err(TreeError::Syntax { .. })
        ));
        assert!(matches!(
            parse_tree("(*,*))", d(2)),
            Err(TreeError::Syntax { .. })
        ));
    }

    #[test]
    fn isomorphic_orderings_serialize_identically() {
        let a = parse_tree("((*,*),*)", d(2)).unwrap();
        let b = parse_tree("(*,(*,*))", d(2)).unwrap();
        assert_eq!(serialize(&a), serialize(&b));
        assert!(is_isomorphic(&a, &b));
        let star = parse_tree("(*,*,*)", d(3)).unwrap();
        assert!(!is_isomorphic(&a, &star));
    }

    #[test]
    fn canonicalize_is_identity_on_canonical_trees() {
        let t = even_tree(d(3), 7);
        assert_eq!(canonicalize(&t), t);
        assert_eq!(canonicalize(&canonicalize(&t)), t);
    }

    #[test]
    fn even_tree_shapes() {
        // Five leaves split as 2+2+1 at the root.
        let e5 = even_tree(d(3), 5);
        let sizes: Vec<u64> = e5.children().iter().map(Tree::leaf_count).collect();
        assert_eq!(sizes, vec![1, 2, 2]);
        assert_eq!(even_tree(d(2), 1), Tree::Leaf);
        for k in 0..=60 {
            assert_eq!(even_tree(d(3), k).leaf_count(), k);
        }
    }

    #[test]
    fn strict_even_tree_shapes() {
        let h3 = strict_even_tree(d(3), 3);
        assert_eq!(h3.leaf_count(), 7);
        let sizes: Vec<u64> = h3.children().iter().map(Tree::leaf_count).collect();
        assert_eq!(sizes, vec![1, 3, 3]);
        assert_eq!(strict_even_tree(d(2), 0), Tree::Leaf);
        // n = 13: n-1 = 12 = 3·4 + 0, so all three branch indices are 4.
        assert_eq!(strict_branch_split(d(3), 13), (4, 0));
        assert_eq!(strict_even_tree(d(3), 13).leaf_count(), 27);
        for n in 0..=50 {
            let t = strict_even_tree(d(3), n);
            assert_eq!(t.leaf_count(), 2 * n + 1);
            assert!(t.is_strictly_d_ary(d(3)));
        }
    }

    #[test]
    fn complete_tree_equals_even_tree_at_powers() {
        for dd in 2..=4u32 {
            for h in 0..=3u32 {
                if u64::from(dd).pow(h) > 100 {
                    continue;
                }
                let c = complete_tree(d(dd), h);
                assert_eq!(c, even_tree(d(dd), u64::from(dd).pow(h)));
                assert_eq!(c.leaf_count(), u64::from(dd).pow(h));
            }
        }
        assert_eq!(complete_tree(d(2), 0), Tree::Leaf);
        assert_eq!(
            complete_tree(d(4), 1),
            parse_tree("(*,*,*,*)", d(4)).unwrap()
        );
    }

    #[test]
    fn caterpillar_structure() {
        assert_eq!(caterpillar(2), parse_tree("(*,*)", d(2)).unwrap());
        assert_eq!(caterpillar(3), parse_tree("((*,*),*)", d(2)).unwrap());
        // k leaves: k-1 internal vertices on a path, each non-deepest one
        // carrying exactly one leaf child.
        let mut t = caterpillar(5);
        let mut internals = 0;
        loop {
            match &t {
                Tree::Leaf => break,
                Tree::Internal(n) => {
                    internals += 1;
                    assert_eq!(n.children.len(), 2);
                    let leaves = n.children.iter().filter(|c| c.is_leaf()).count();
                    assert!(leaves == 1 || (leaves == 2 && n.leaf_count == 2));
                    t = n.children.last().unwrap().clone();
                }
                Tree::Empty => unreachable!(),
            }
        }
        assert_eq!(internals, 4);
        assert!(caterpillar(7).is_binary_caterpillar());
        assert!(!even_tree(d(2), 4).is_binary_caterpillar());
    }

    #[test]
    fn branch_padding() {
        let cherry = caterpillar(2);
        assert_eq!(
            branches(&cherry, d(3)),
            vec![Tree::Leaf, Tree::Leaf, Tree::Empty]
        );
        assert_eq!(branches(&Tree::Leaf, d(2)), vec![Tree::Empty, Tree::Empty]);
        let e5 = even_tree(d(3), 5);
        let sizes: Vec<u64> = branches(&e5, d(3)).iter().map(Tree::leaf_count).collect();
        assert_eq!(sizes, vec![1, 2, 2]);
    }

    #[test]
    fn balancedness() {
        let fig4 = parse_tree(
            "(((*,*,*,*),*),(*,*,(*,*),*),((*,*),(*,*)),(*,*,(*,*)))",
            d(4),
        )
        .unwrap();
        assert!(is_balanced(&fig4, d(4)));
        // Branch sizes 1, 2, 3: not balanced.
        let t2 = parse_tree("(*,(*,*),(*,*,*))", d(3)).unwrap();
        assert!(!is_balanced(&t2, d(3)));
        assert!(is_balanced(&parse_tree("(*,*)", d(4)).unwrap(), d(4)));
        assert!(is_balanced(&Tree::Leaf, d(3)));
        // Root degree 2 < d with a large branch: padding breaks balance.
        assert!(!is_balanced(
            &parse_tree("((*,*),(*,*))", d(3)).unwrap(),
            d(3)
        ));
    }

    #[test]
    fn induce_singletons_and_full_sets() {
        let t = strict_even_tree(d(3), 3);
        for i in 0..t.leaf_count() {
            assert_eq!(induce_subtree(&t, &[i]).unwrap(), Tree::Leaf);
        }
        let all: Vec<u64> = (0..t.leaf_count()).collect();
        assert_eq!(induce_subtree(&t, &all).unwrap(), t);
    }

    #[test]
    fn induce_suppresses_path_vertices() {
        // Ternary host with seven leaves; canonical child order sorts the
        // branches as [leaf, 2-leaf, 4-leaf], so depth-first leaf indices are
        // 0 | 1 2 | 3 4 5 6 with the 4-leaf branch ordered (*,*,(*,*)).
        let t = parse_tree("((*,*),*,((*,*),*,*))", d(3)).unwrap();
        assert_eq!(serialize(&t), "(*,(*,*),(*,*,(*,*)))");
        // One leaf from each small branch plus the deep cherry's sibling
        // leaves: the chain above the deep pair is suppressed.
        let induced = induce_subtree(&t, &[0, 2, 3, 5]).unwrap();
        assert_eq!(serialize(&induced), "(*,*,(*,*))");
    }

    #[test]
    fn induce_error_paths() {
        let t = even_tree(d(2), 4);
        assert!(matches!(
            induce_subtree(&t, &[4]),
            Err(TreeError::LeafIndex {
                index: 4,
                leaf_count: 4
            })
        ));
        assert!(matches!(induce_subtree(&t, &[]), Err(TreeError::Domain(_))));
        assert!(matches!(
            induce_subtree(&Tree::Empty, &[0]),
            Err(TreeError::Domain(_))
        ));
        // Duplicates collapse to the singleton case.
        assert_eq!(induce_subtree(&t, &[1, 1]).unwrap(), Tree::Leaf);
    }

    #[test]
    fn enumeration_small_counts() {
        let binary: Vec<usize> = (1..=8)
            .map(|n| enumerate_trees(d(2), n, false).unwrap().count())
            .collect();
        assert_eq!(binary, vec![1, 1, 1, 2, 3, 6, 11, 23]);
        assert_eq!(enumerate_trees(d(3), 4, false).unwrap().count(), 4);
        assert!(matches!(
            enumerate_trees(d(3), 4, true),
            Err(TreeError::Domain(_))
        ));
        assert!(matches!(
            enumerate_trees(d(3), 0, false),
            Err(TreeError::Domain(_))
        ));
    }

    #[test]
    fn enumeration_is_sorted_and_distinct() {
        let all: Vec<Tree> = enumerate_trees(d(3), 7, false).unwrap().collect();
        for w in all.windows(2) {
            assert!(w[0].canon_key() < w[1].canon_key());
        }
        let strict: Vec<Tree> = enumerate_trees(d(3), 7, true).unwrap().collect();
        assert!(strict.iter().all(|t| t.is_strictly_d_ary(d(3))));
        assert!(strict.iter().any(|t| *t == strict_even_tree(d(3), 3)));
        assert!(strict.len() < all.len());
    }
}
