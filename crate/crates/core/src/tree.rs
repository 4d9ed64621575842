//! Rooted-tree combinatorics.
//!
//! Vertices of the rooted `q`-homogeneous tree are words over the generators
//! `1..=q` of the free semigroup; the empty word is the root. A finite window
//! of depth `D` is a [`TreeTruncation`], whose breadth-first index is the row
//! order of every matrix built downstream. Arbitrary finite rooted trees are
//! handled by [`GeneralRootedTree`], which only supports descendant counting.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of vertices of a truncation.
pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

/// A vertex of the free semigroup tree, stored as its generator digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex(Vec<u32>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    /// Builds a vertex from generator digits; every digit must be at least 1.
    pub fn new(digits: Vec<u32>) -> Result<Self> {
        if digits.contains(&0) {
            return Err(Error::InvalidArgument(
                "vertex digits are generators 1..=q; 0 is not allowed".into(),
            ));
        }
        Ok(Vertex(digits))
    }

    /// `s_i^k`: the generator `i` repeated `k` times.
    pub fn power(generator: u32, k: usize) -> Self {
        Vertex(vec![generator; k])
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Word length `|σ|`, i.e. the distance to the root.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, generator: u32) -> Self {
        let mut digits = self.0.clone();
        digits.push(generator);
        Vertex(digits)
    }

    /// True when `self` is a prefix of `other` (`self ≼ other`).
    pub fn precedes(&self, other: &Vertex) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for d in &self.0 {
            write!(f, "s{d}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Vertex {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form: `e` or `s1s2…`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" {
            return Ok(Vertex::root());
        }
        let bad = || Error::InvalidArgument(format!("`{s}` is not a vertex label (expected `e` or `s1s2…`)"));
        let rest = s.strip_prefix('s').ok_or_else(bad)?;
        let digits = rest
            .split('s')
            .map(|d| d.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Vertex::new(digits)
    }
}

/// Which argument of [`relation`] is the ancestor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ancestor {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Comparable { distance: usize, ancestor: Ancestor },
    Incomparable,
}

impl Relation {
    pub fn is_comparable(&self) -> bool {
        matches!(self, Relation::Comparable { .. })
    }
}

/// Partial order and graph distance between two vertices. Equal vertices are
/// comparable at distance 0 with the first argument reported as ancestor.
pub fn relation(a: &Vertex, b: &Vertex) -> Relation {
    if a.precedes(b) {
        Relation::Comparable {
            distance: b.len() - a.len(),
            ancestor: Ancestor::First,
        }
    } else if b.precedes(a) {
        Relation::Comparable {
            distance: a.len() - b.len(),
            ancestor: Ancestor::Second,
        }
    } else {
        Relation::Incomparable
    }
}

/// Number of vertices of depth at most `depth` in the `q`-homogeneous tree.
pub fn homogeneous_count(q: usize, depth: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=depth {
        total = total.saturating_add(level);
        level = level.saturating_mul(q as u128);
    }
    total
}

/// All vertices of `T_q` with `|σ| ≤ D`, in breadth-first order.
#[derive(Debug, Clone)]
pub struct TreeTruncation {
    q: usize,
    depth: usize,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
}

impl TreeTruncation {
    pub fn new(q: usize, depth: usize) -> Result<Self> {
        Self::with_cap(q, depth, DEFAULT_VERTEX_CAP)
    }

    pub fn with_cap(q: usize, depth: usize, cap: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("arity q = {q} must be at least 2")));
        }
        let count = homogeneous_count(q, depth);
        if count > cap as u128 {
            return Err(Error::CapExceeded { count, cap });
        }
        let mut vertices = Vec::with_capacity(count as usize);
        vertices.push(Vertex::root());
        let mut start = 0;
        for _ in 0..depth {
            let end = vertices.len();
            for i in start..end {
                for g in 1..=q as u32 {
                    let child = vertices[i].child(g);
                    vertices.push(child);
                }
            }
            start = end;
        }
        let index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        Ok(TreeTruncation {
            q,
            depth,
            vertices,
            index,
        })
    }

    pub fn arity(&self) -> usize {
        self.q
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Index range of the vertices with `|σ| = level`.
    pub fn level_range(&self, level: usize) -> std::ops::Range<usize> {
        assert!(level <= self.depth, "level {level} beyond depth {}", self.depth);
        let start = homogeneous_count(self.q, level) - self.q.pow(level as u32) as u128;
        let start = start as usize;
        start..start + self.q.pow(level as u32)
    }

    pub fn labels(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.to_string()).collect()
    }

    pub fn to_general(&self) -> GeneralRootedTree {
        let parents = self
            .vertices
            .iter()
            .map(|v| {
                if v.is_root() {
                    None
                } else {
                    let parent = Vertex(v.0[..v.0.len() - 1].to_vec());
                    Some(self.index[&parent])
                }
            })
            .collect();
        GeneralRootedTree::from_parents(parents).expect("truncation is a valid rooted tree")
    }
}

/// `(e, s₁, …, s₁ⁿ, s₂, …, s₂ⁿ, …, s_q, …, s_qⁿ)`: the depth-`n` window of `T(q;1)`.
pub fn tq1_truncation(q: usize, n: usize) -> Result<Vec<Vertex>> {
    if q < 2 || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "T(q;1) window needs q >= 2 and n >= 1 (got q = {q}, n = {n})"
        )));
    }
    let mut out = Vec::with_capacity(1 + q * n);
    out.push(Vertex::root());
    for g in 1..=q as u32 {
        for k in 1..=n {
            out.push(Vertex::power(g, k));
        }
    }
    Ok(out)
}

/// A finite rooted tree given by a parent array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralRootedTree {
    parents: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl GeneralRootedTree {
    /// `parents[v]` is `None` for the root. Rejects forests, cycles and
    /// out-of-range parents.
    pub fn from_parents(parents: Vec<Option<usize>>) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::InvalidTree("empty parent array".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parents[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidTree(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::InvalidTree(format!("parent {p} of vertex {v} out of range")));
                }
                children[p].push(v);
            }
        }
        let root = roots[0];
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        let mut reached = 0;
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            reached += 1;
            stack.extend(children[v].iter().copied());
        }
        if reached != n {
            return Err(Error::InvalidTree(format!(
                "{} vertices are unreachable from the root (cycle or detached component)",
                n - reached
            )));
        }
        Ok(GeneralRootedTree {
            parents,
            children,
            root,
        })
    }

    /// Parent array where the root is marked by being its own parent or by a
    /// negative entry.
    pub fn from_signed_parents(raw: &[i64]) -> Result<Self> {
        let parents = raw
            .iter()
            .enumerate()
            .map(|(v, &p)| {
                if p < 0 || p as usize == v {
                    Ok(None)
                } else {
                    Ok(Some(p as usize))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parents(parents)
    }

    /// Depth-`n` window of `T(q;1)`, vertex 0 the root, ordered as in
    /// [`tq1_truncation`].
    pub fn tq1(q: usize, n: usize) -> Result<Self> {
        tq1_truncation(q, n)?;
        let mut parents = vec![None];
        for branch in 0..q {
            for k in 1..=n {
                let p = if k == 1 { 0 } else { 1 + branch * n + (k - 2) };
                parents.push(Some(p));
            }
        }
        Self::from_parents(parents)
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// `descendant_counts(n)[v]` = number of descendants of `v` at distance exactly `n`.
    pub fn descendant_counts(&self, n: usize) -> Vec<u128> {
        let mut counts = vec![1u128; self.len()];
        for _ in 0..n {
            counts = (0..self.len())
                .map(|v| self.children[v].iter().map(|&c| counts[c]).sum())
                .collect();
        }
        counts
    }

    /// `Δ_n`: the maximal number of `n`-th descendants over all vertices.
    pub fn delta_n(&self, n: usize) -> u128 {
        self.descendant_counts(n).into_iter().max().unwrap_or(0)
    }

    /// `Δ_1..=Δ_{n_max}` computed in one sweep.
    pub fn delta_sequence(&self, n_max: usize) -> Vec<u128> {
        let mut counts = vec![1u128; self.len()];
        let mut out = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            counts = (0..self.len())
                .map(|v| self.children[v].iter().map(|&c| counts[c]).sum())
                .collect();
            out.push(counts.iter().copied().max().unwrap_or(0));
        }
        out
    }
}

/// JSON description of a tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeSpec {
    Homogeneous { q: usize, depth: usize },
    ParentArray { parents: Vec<i64> },
    Tq1 { q: usize, n: usize },
}

impl TreeSpec {
    pub fn build(&self) -> Result<GeneralRootedTree> {
        match *self {
            TreeSpec::Homogeneous { q, depth } => Ok(TreeTruncation::new(q, depth)?.to_general()),
            TreeSpec::ParentArray { ref parents } => GeneralRootedTree::from_signed_parents(parents),
            TreeSpec::Tq1 { q, n } => GeneralRootedTree::tq1(q, n),
        }
    }
}
