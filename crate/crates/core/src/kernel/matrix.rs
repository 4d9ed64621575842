use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative Hermitian-symmetry tolerance accepted on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default PSD tolerance: `λ_min ≥ −PSD_TOL·max(1, trace)`.
pub const PSD_TOL: f64 = 1e-9;

/// A labeled complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
    labels: Vec<String>,
}

impl HermitianMatrix {
    /// Checks `A[i][j] = conj(A[j][i])` to [`HERMITIAN_TOL`] relative to the
    /// largest entry, then symmetrizes exactly.
    pub fn new(data: DMatrix<Complex64>, labels: Vec<String>) -> Result<Self> {
        let n = data.nrows();
        if data.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, not square",
                n,
                data.ncols()
            )));
        }
        if labels.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} labels for a {n}x{n} matrix",
                labels.len()
            )));
        }
        let scale = data.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        for i in 0..n {
            for j in i..n {
                let dev = (data[(i, j)] - data[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOL * scale {
                    return Err(Error::NotHermitian { i, j, deviation: dev });
                }
            }
        }
        let mut data = data;
        for i in 0..n {
            data[(i, i)].im = 0.0;
            for j in (i + 1)..n {
                let avg = (data[(i, j)] + data[(j, i)].conj()) * 0.5;
                data[(i, j)] = avg;
                data[(j, i)] = avg.conj();
            }
        }
        Ok(HermitianMatrix { data, labels })
    }

    /// Labels `"0"`, `"1"`, ….
    pub fn unlabeled(data: DMatrix<Complex64>) -> Result<Self> {
        let labels = (0..data.nrows()).map(|i| i.to_string()).collect();
        Self::new(data, labels)
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let data = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rows[i].get(j).copied().unwrap_or(f64::NAN), 0.0)
        });
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Self::unlabeled(data)
    }

    pub fn identity(n: usize) -> Self {
        Self::unlabeled(DMatrix::identity(n, n)).expect("identity is Hermitian")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for size {}",
                labels.len(),
                self.size()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn trace(&self) -> f64 {
        (0..self.size()).map(|i| self.data[(i, i)].re).sum()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.data.map(|z| z.re)
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> HermitianMatrix {
        let data = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.data[(idx[i], idx[j])]);
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        HermitianMatrix { data, labels }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.size() == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = if self.is_real() {
            self.real_part().symmetric_eigenvalues().iter().copied().collect()
        } else {
            self.data.clone().symmetric_eigenvalues().iter().copied().collect()
        };
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigen-decomposition `A = U diag(λ) U*`.
    pub fn eigen(&self) -> (DVector<f64>, DMatrix<Complex64>) {
        if self.is_real() {
            let e = SymmetricEigen::new(self.real_part());
            (e.eigenvalues, e.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        } else {
            let e = SymmetricEigen::new(self.data.clone());
            (e.eigenvalues, e.eigenvectors)
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(f64::INFINITY)
    }

    /// Row-major CSV, each entry written as an `re,im` pair (negative zeros printed as `0`).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.size() {
            for j in 0..self.size() {
                if j > 0 {
                    out.push(',');
                }
                let z = self.data[(i, j)];
                let _ = write!(out, "{},{}", z.re + 0.0, z.im + 0.0);
            }
            out.push('\n');
        }
        out
    }
}

/// JSON export: labels plus separate real and imaginary row-major arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub labels: Vec<String>,
    pub re: Vec<Vec<f64>>,
    /// May be omitted for real matrices.
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl From<&HermitianMatrix> for MatrixJson {
    fn from(a: &HermitianMatrix) -> Self {
        let n = a.size();
        MatrixJson {
            labels: a.labels.clone(),
            re: (0..n)
                .map(|i| (0..n).map(|j| a.data[(i, j)].re + 0.0).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| a.data[(i, j)].im + 0.0).collect())
                .collect(),
        }
    }
}

impl TryFrom<MatrixJson> for HermitianMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let n = json.re.len();
        let mut json = json;
        if json.im.is_empty() {
            json.im = vec![vec![0.0; n]; n];
        }
        if json.im.len() != n || json.re.iter().chain(json.im.iter()).any(|r| r.len() != n) {
            return Err(Error::Schema("matrix re/im arrays must both be n x n".into()));
        }
        let data = DMatrix::from_fn(n, n, |i, j| Complex64::new(json.re[i][j], json.im[i][j]));
        HermitianMatrix::new(data, json.labels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// The threshold `−tol·max(1, trace)` that `min_eigenvalue` was compared to.
    pub threshold: f64,
}

/// `psd ⇔ λ_min ≥ −tol_rel·max(1, trace(A))`.
pub fn psd_check(a: &HermitianMatrix, tol_rel: f64) -> PsdReport {
    let min_eigenvalue = a.min_eigenvalue();
    let threshold = -tol_rel * a.trace().max(1.0);
    PsdReport {
        psd: min_eigenvalue >= threshold,
        min_eigenvalue,
        threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_psd() {
        let r = psd_check(&HermitianMatrix::identity(5), PSD_TOL);
        assert!(r.psd);
        assert!((r.min_eigenvalue - 1.0).abs() < 1e-14);
    }

    #[test]
    fn star_with_large_weights_is_not_psd() {
        let a = HermitianMatrix::from_real(&[vec![1.0, 0.8, 0.8], vec![0.8, 1.0, 0.0], vec![0.8, 0.0, 1.0]]).unwrap();
        let r = psd_check(&a, PSD_TOL);
        assert!(!r.psd);
        assert!((r.min_eigenvalue - (1.0 - 0.8 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn a2_is_psd_with_zero_min_eigenvalue() {
        let c = 0.5f64.sqrt();
        let a = HermitianMatrix::from_real(&[vec![1.0, c, c], vec![c, 1.0, 0.0], vec![c, 0.0, 1.0]]).unwrap();
        let r = psd_check(&a, PSD_TOL);
        assert!(r.psd);
        assert!(r.min_eigenvalue.abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let data = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.1),
                Complex64::new(0.5, 0.1),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            HermitianMatrix::unlabeled(data),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn complex_eigenvalues() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let data = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let a = HermitianMatrix::unlabeled(data).unwrap();
        let ev = a.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn csv_and_json_export() {
        let a = HermitianMatrix::identity(2);
        assert_eq!(a.to_csv(), "1,0,0,0\n0,0,1,0\n");
        let json = MatrixJson::from(&a);
        let back = HermitianMatrix::try_from(json).unwrap();
        assert_eq!(back, a);
    }
}
