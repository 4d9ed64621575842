use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::matrix::HermitianMatrix;
use super::sequence::HpdSequence;
use crate::error::{Error, Result};
use crate::tree::{homogeneous_count, relation, Ancestor, Relation, TreeTruncation, Vertex, DEFAULT_VERTEX_CAP};

/// Kernel on an arbitrary vertex list: `value(d)` when the row vertex precedes
/// the column vertex at distance `d`, its conjugate in the reverse case, 0 otherwise.
pub fn branching_kernel(vertices: &[Vertex], value: impl Fn(usize) -> Complex64 + Sync) -> HermitianMatrix {
    let n = vertices.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| match relation(&vertices[i], &vertices[j]) {
                    Relation::Comparable {
                        distance,
                        ancestor: Ancestor::First,
                    } => value(distance),
                    Relation::Comparable {
                        distance,
                        ancestor: Ancestor::Second,
                    } => value(distance).conj(),
                    Relation::Incomparable => Complex64::default(),
                })
                .collect()
        })
        .collect();
    let data = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let labels = vertices.iter().map(|v| v.to_string()).collect();
    HermitianMatrix::new(data, labels).expect("branching kernels are Hermitian by construction")
}

/// The branching-Toeplitz kernel of `alpha` restricted to a truncation, rows in breadth-first order.
pub fn branching_toeplitz(alpha: &HpdSequence, trunc: &TreeTruncation) -> Result<HermitianMatrix> {
    if trunc.arity() != alpha.arity() {
        return Err(Error::InvalidArgument(format!(
            "truncation arity {} differs from sequence arity {}",
            trunc.arity(),
            alpha.arity()
        )));
    }
    alpha.require(trunc.depth())?;
    Ok(branching_kernel(trunc.vertices(), |d| alpha.get(d as i64)))
}

/// Glues `k1` on `Σ₁` and `k2` on `Σ₂` along the shared label `x0`.
///
/// Rows are `Σ₁` in its own order followed by `Σ₂ ∖ {x0}`; cross entries are
/// `K(σ₁, σ₂) = K₁(σ₁, x0)·K₂(x0, σ₂)`.
pub fn markov_product(k1: &HermitianMatrix, k2: &HermitianMatrix, x0: &str) -> Result<HermitianMatrix> {
    let i0 = k1.index_of(x0).ok_or_else(|| Error::MissingLabel(x0.to_string()))?;
    let j0 = k2.index_of(x0).ok_or_else(|| Error::MissingLabel(x0.to_string()))?;
    for (k, idx) in [(k1, i0), (k2, j0)] {
        let d = k.get(idx, idx);
        if (d - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "diagonal at shared point {x0} is {d}, not 1"
            )));
        }
    }
    let rest: Vec<usize> = (0..k2.size()).filter(|&j| j != j0).collect();
    if let Some(&j) = rest.iter().find(|&&j| k1.index_of(&k2.labels()[j]).is_some()) {
        return Err(Error::InvalidArgument(format!(
            "label {} appears in both index sets besides the shared point",
            k2.labels()[j]
        )));
    }
    let n1 = k1.size();
    let n = n1 + rest.len();
    let data = DMatrix::from_fn(n, n, |a, b| match (a < n1, b < n1) {
        (true, true) => k1.get(a, b),
        (false, false) => k2.get(rest[a - n1], rest[b - n1]),
        (true, false) => k1.get(a, i0) * k2.get(j0, rest[b - n1]),
        (false, true) => k2.get(rest[a - n1], j0) * k1.get(i0, b),
    });
    let mut labels = k1.labels().to_vec();
    labels.extend(rest.iter().map(|&j| k2.labels()[j].clone()));
    HermitianMatrix::new(data, labels)
}

/// Cylinder-indicator factorization of the `β_q` kernel.
#[derive(Debug, Clone)]
pub struct CantorGram {
    pub labels: Vec<String>,
    /// One row per vertex (breadth-first), one column per depth-`D` leaf in lexicographic order.
    pub vectors: DMatrix<f64>,
    /// Weight of each leaf, `q^{-D}`.
    pub leaf_weight: f64,
    pub gram: HermitianMatrix,
}

/// Vectors `q^{|σ|/2}·1[leaf below σ]` and their Gram matrix under leaf weight `q^{-D}`.
pub fn cantor_gram(q: usize, depth: usize) -> Result<CantorGram> {
    let trunc = TreeTruncation::new(q, depth)?;
    let leaves = match q.checked_pow(depth as u32) {
        Some(l) if l <= DEFAULT_VERTEX_CAP => l,
        _ => {
            return Err(Error::CapExceeded {
                count: homogeneous_count(q, depth),
                cap: DEFAULT_VERTEX_CAP,
            })
        }
    };
    let qf = q as f64;
    let mut vectors = DMatrix::<f64>::zeros(trunc.len(), leaves);
    for (row, v) in trunc.vertices().iter().enumerate() {
        let k = v.len();
        let block = leaves / q.pow(k as u32);
        let start = v.digits().iter().fold(0usize, |acc, &d| acc * q + (d as usize - 1)) * block;
        let value = qf.powf(k as f64 / 2.0);
        for col in start..start + block {
            vectors[(row, col)] = value;
        }
    }
    let leaf_weight = qf.powf(-(depth as f64));
    let gram_real = &vectors * vectors.transpose() * leaf_weight;
    let gram = HermitianMatrix::new(gram_real.map(|x| Complex64::new(x, 0.0)), trunc.labels())?;
    Ok(CantorGram {
        labels: trunc.labels(),
        vectors,
        leaf_weight,
        gram,
    })
}
