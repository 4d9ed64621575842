use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::construct::branching_toeplitz;
use super::matrix::{psd_check, HermitianMatrix, PSD_TOL};
use crate::circle::SpectralMeasure;
use crate::error::{Error, Result};
use crate::tree::TreeTruncation;

/// Absolute slack allowed in the decay test `|α(n)| ≤ α(0) q^{-n/2}`.
pub const DECAY_TOL: f64 = 1e-12;

/// A candidate `q`-HPD sequence `α(0..=n_max)`, extended by `α(-n) = conj(α(n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct HpdSequence {
    q: usize,
    values: Vec<Complex64>,
}

impl HpdSequence {
    pub fn new(q: usize, values: Vec<Complex64>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("arity q = {q} must be at least 2")));
        }
        if values.is_empty() {
            return Err(Error::InvalidArgument("sequence needs at least α(0)".into()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("sequence has non-finite values".into()));
        }
        Ok(HpdSequence { q, values })
    }

    pub fn from_real(q: usize, values: &[f64]) -> Result<Self> {
        Self::new(q, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// `β_q(n) = q^{-n/2}`.
    pub fn beta(q: usize, n_max: usize) -> Self {
        let values = (0..=n_max)
            .map(|n| Complex64::new((q as f64).powf(-(n as f64) / 2.0), 0.0))
            .collect();
        Self::new(q, values).expect("valid arity")
    }

    /// `δ_{n0}`.
    pub fn white_noise(q: usize, n_max: usize) -> Self {
        let mut values = vec![Complex64::default(); n_max + 1];
        values[0] = Complex64::new(1.0, 0.0);
        Self::new(q, values).expect("valid arity")
    }

    pub fn arity(&self) -> usize {
        self.q
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `α(n)` for `n ≥ 0`, `conj(α(−n))` for `n < 0`.
    pub fn get(&self, n: i64) -> Complex64 {
        let v = self.values[n.unsigned_abs() as usize];
        if n < 0 {
            v.conj()
        } else {
            v
        }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    /// `ν̂_α(n) = q^{n/2} α(n)`.
    pub fn spectral_coefficient(&self, n: i64) -> Complex64 {
        self.get(n) * (self.q as f64).powf(n.unsigned_abs() as f64 / 2.0)
    }

    pub fn truncated(&self, n_max: usize) -> Result<Self> {
        self.require(n_max)?;
        Self::new(self.q, self.values[..=n_max].to_vec())
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::SequenceTooShort {
                available: self.n_max(),
                requested: n,
            });
        }
        Ok(())
    }
}

/// `α(n) = q^{-n/2} ν̂(n)` for `0 ≤ n ≤ n_max`.
pub fn alpha_from_measure(nu: &SpectralMeasure, q: usize, n_max: usize) -> Result<HpdSequence> {
    let values = (0..=n_max)
        .map(|n| nu.fourier(n as i64) * (q as f64).powf(-(n as f64) / 2.0))
        .collect();
    HpdSequence::new(q, values)
}

/// `α_ν(n) = ν̂(n)·α(n)`.
pub fn modulate(alpha: &HpdSequence, nu: &SpectralMeasure) -> HpdSequence {
    let values = alpha
        .values
        .iter()
        .enumerate()
        .map(|(n, a)| a * nu.fourier(n as i64))
        .collect();
    HpdSequence::new(alpha.q, values).expect("modulation preserves validity")
}

/// Toeplitz matrix `[c(j−i)]_{0≤i,j≤order}` of a sequence with `c(−k) = conj(c(k))`.
pub fn toeplitz(order: usize, c: impl Fn(i64) -> Complex64) -> HermitianMatrix {
    let n = order + 1;
    let data = DMatrix::from_fn(n, n, |i, j| c(j as i64 - i as i64));
    HermitianMatrix::unlabeled(data).expect("Toeplitz matrix of a Hermitian sequence is Hermitian")
}

/// `[q^{|j−i|/2} α(j−i)]_{0≤i,j≤order}`, the Toeplitz matrix of `ν̂_α`.
pub fn spectral_toeplitz(alpha: &HpdSequence, order: usize) -> Result<HermitianMatrix> {
    alpha.require(order)?;
    Ok(toeplitz(order, |k| alpha.spectral_coefficient(k)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HpdMethod {
    DecayReject,
    Toeplitz,
    TreeOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeOracle {
    pub depth: usize,
    pub psd: bool,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpdReport {
    /// Toeplitz verdict: true means "consistent up to `order`", never a proof.
    pub verdict: bool,
    pub method: HpdMethod,
    pub order: usize,
    pub message: String,
    /// First `n` violating the decay bound, if any.
    pub failing_n: Option<usize>,
    pub toeplitz_min_eigenvalue: Option<f64>,
    pub tree_oracle: Option<TreeOracle>,
    /// Set when the tree oracle disagrees with the Toeplitz verdict.
    pub oracle_disagrees: bool,
}

/// Finite-order semi-decision for `q`-HPD-ness.
///
/// Stage (i) rejects on the decay bound `|α(n)| ≤ α(0) q^{-n/2}` for
/// `1 ≤ n ≤ order`; stage (ii) eigensolves the `(order+1)×(order+1)` Toeplitz
/// matrix of `q^{n/2}α(n)`; stage (iii), when `depth_oracle` is given,
/// eigensolves the tree kernel at that depth for cross-validation.
pub fn hpd_check(alpha: &HpdSequence, order: usize, depth_oracle: Option<usize>) -> Result<HpdReport> {
    alpha.require(order)?;
    let q = alpha.q as f64;
    let a0 = alpha.values[0];
    let tree_oracle = match depth_oracle {
        Some(depth) => {
            alpha.require(depth)?;
            let trunc = TreeTruncation::new(alpha.q, depth)?;
            let r = psd_check(&branching_toeplitz(alpha, &trunc)?, PSD_TOL);
            Some(TreeOracle {
                depth,
                psd: r.psd,
                min_eigenvalue: r.min_eigenvalue,
            })
        }
        None => None,
    };
    let disagrees = |verdict: bool| tree_oracle.as_ref().is_some_and(|t| t.psd != verdict);

    if a0.im != 0.0 || a0.re < 0.0 {
        return Ok(HpdReport {
            verdict: false,
            method: HpdMethod::DecayReject,
            order,
            message: format!("α(0) = {a0} is not a non-negative real"),
            failing_n: Some(0),
            toeplitz_min_eigenvalue: None,
            oracle_disagrees: disagrees(false),
            tree_oracle,
        });
    }
    if let Some(n) = (1..=order).find(|&n| alpha.values[n].norm() > a0.re * q.powf(-(n as f64) / 2.0) + DECAY_TOL) {
        return Ok(HpdReport {
            verdict: false,
            method: HpdMethod::DecayReject,
            order,
            message: format!(
                "decay bound violated at n = {n}: |α({n})| = {:e} > α(0) q^(-n/2) = {:e}",
                alpha.values[n].norm(),
                a0.re * q.powf(-(n as f64) / 2.0)
            ),
            failing_n: Some(n),
            toeplitz_min_eigenvalue: None,
            oracle_disagrees: disagrees(false),
            tree_oracle,
        });
    }
    let report = psd_check(&spectral_toeplitz(alpha, order)?, PSD_TOL);
    let message = if report.psd {
        format!("consistent up to {order}")
    } else {
        format!(
            "Toeplitz matrix of order {order} is not PSD (min eigenvalue {:e})",
            report.min_eigenvalue
        )
    };
    Ok(HpdReport {
        verdict: report.psd,
        method: if tree_oracle.is_some() {
            HpdMethod::TreeOracle
        } else {
            HpdMethod::Toeplitz
        },
        order,
        message,
        failing_n: None,
        toeplitz_min_eigenvalue: Some(report.min_eigenvalue),
        oracle_disagrees: disagrees(report.psd),
        tree_oracle,
    })
}

/// JSON layout `{"q": 2, "alpha": [1.0, [0.5, -0.1], ...]}`; entries are reals or `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HpdSequenceJson {
    pub q: usize,
    pub alpha: Vec<ScalarJson>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Real(f64),
    Complex([f64; 2]),
}

impl TryFrom<HpdSequenceJson> for HpdSequence {
    type Error = Error;

    fn try_from(json: HpdSequenceJson) -> Result<Self> {
        let values = json
            .alpha
            .into_iter()
            .map(|s| match s {
                ScalarJson::Real(x) => Complex64::new(x, 0.0),
                ScalarJson::Complex([re, im]) => Complex64::new(re, im),
            })
            .collect();
        HpdSequence::new(json.q, values)
    }
}

impl From<&HpdSequence> for HpdSequenceJson {
    fn from(a: &HpdSequence) -> Self {
        HpdSequenceJson {
            q: a.q,
            alpha: a
                .values
                .iter()
                .map(|z| {
                    if z.im == 0.0 {
                        ScalarJson::Real(z.re)
                    } else {
                        ScalarJson::Complex([z.re, z.im])
                    }
                })
                .collect(),
        }
    }
}
