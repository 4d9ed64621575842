//! Prediction distances `d(X_e, span{X_σ : σ ≠ e})`: Szegő-type closed forms and
//! finite-dimensional least-squares oracles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{ac_szego_mean, SpectralMeasure, SzegoMethod};
use crate::criterion::{tq1_criterion, CriterionReport};
use crate::error::{Error, Result};
use crate::kernel::{
    alpha_from_measure, branching_toeplitz, psd_check, spectral_toeplitz, HermitianMatrix, HpdSequence, PSD_TOL,
};
use crate::tree::{homogeneous_count, TreeTruncation};

/// Relative eigenvalue cutoff of the pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Default depth schedule.
pub const DEFAULT_DEPTHS: [usize; 6] = [1, 2, 3, 4, 6, 8];

/// Largest tree kernel the oracle eigensolves directly; deeper levels use the symmetric reduction.
pub const MAX_TREE_ORACLE: usize = 1100;

/// Distance from variable `target` to the span of the others, for covariance `A`:
/// `d² = A_tt − v B⁺ v*` with `B` the complementary block and `v` the target row.
pub fn finite_distance(a: &HermitianMatrix, target: usize) -> Result<f64> {
    if target >= a.size() {
        return Err(Error::InvalidArgument(format!(
            "target {target} out of range for size {}",
            a.size()
        )));
    }
    let report = psd_check(a, PSD_TOL);
    if !report.psd {
        return Err(Error::NotPsd {
            min_eigenvalue: report.min_eigenvalue,
        });
    }
    let rest: Vec<usize> = (0..a.size()).filter(|&i| i != target).collect();
    let att = a.get(target, target).re;
    if rest.is_empty() {
        return Ok(att.max(0.0).sqrt());
    }
    let (lambda, u) = a.submatrix(&rest).eigen();
    let cutoff = PINV_CUTOFF * lambda.iter().fold(0.0f64, |m, &l| m.max(l));
    let projected: f64 = (0..rest.len())
        .filter(|&k| lambda[k] > cutoff)
        .map(|k| {
            let vu: num_complex::Complex64 = rest
                .iter()
                .enumerate()
                .map(|(p, &i)| a.get(target, i) * u[(p, k)])
                .sum();
            vu.norm_sqr() / lambda[k]
        })
        .sum();
    Ok((att - projected).max(0.0).sqrt())
}

/// Distance from `Θ_0` to `span{Θ_1..Θ_n}` using `Cov(Θ_i, Θ_j) = q^{(j−i)/2} α(j−i)`.
pub fn symmetric_reduction(alpha: &HpdSequence, n: usize) -> Result<f64> {
    finite_distance(&spectral_toeplitz(alpha, n)?, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Tree,
    Reduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub depth: usize,
    pub value: f64,
    pub method: OracleMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictOptions {
    pub grid: usize,
    pub tol: f64,
    /// Always use the symmetric reduction instead of the tree kernel.
    pub reduction_only: bool,
}

impl Default for PredictOptions {
    fn default() -> Self {
        PredictOptions {
            grid: crate::circle::DEFAULT_GRID,
            tol: 1e-6,
            reduction_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub q: usize,
    /// `exp(½ ∫ log w dm)` of the absolutely continuous density.
    pub szego_value: f64,
    pub szego_method: SzegoMethod,
    pub oracle_values: Vec<OracleValue>,
    pub converged: bool,
    /// Last oracle value minus `szego_value`.
    pub gap: f64,
}

/// Tree prediction distance for `α` with spectral measure `ν_α` (coefficients `q^{n/2}α(n)`).
pub fn predict_tq(
    alpha: &HpdSequence,
    nu: Option<&SpectralMeasure>,
    depths: &[usize],
    opts: &PredictOptions,
) -> Result<PredictionReport> {
    let nu = nu.ok_or_else(|| {
        Error::InvalidMeasure("the spectral measure of α needs an explicit density representation".into())
    })?;
    let q = alpha.arity();
    let n_max = depths.iter().copied().max().unwrap_or(0);
    alpha.require(n_max)?;
    for n in 0..=n_max as i64 {
        let want = alpha.spectral_coefficient(n);
        let got = nu.fourier(n);
        if (want - got).norm() > 1e-8 * want.norm().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "measure coefficient {n} is {got}, but q^(n/2)·α(n) = {want}"
            )));
        }
    }
    let gm = ac_szego_mean(nu, opts.grid);
    let szego_value = gm.value.sqrt();
    let oracle_values = depths
        .par_iter()
        .map(|&d| {
            let tree_fits = homogeneous_count(q, d) <= MAX_TREE_ORACLE as u128;
            if tree_fits && !opts.reduction_only {
                let kernel = branching_toeplitz(alpha, &TreeTruncation::new(q, d)?)?;
                Ok(OracleValue {
                    depth: d,
                    value: finite_distance(&kernel, 0)?,
                    method: OracleMethod::Tree,
                })
            } else {
                Ok(OracleValue {
                    depth: d,
                    value: symmetric_reduction(alpha, d)?,
                    method: OracleMethod::Reduction,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let (gap, converged) = match oracle_values.last() {
        None => (f64::NAN, false),
        Some(last) => {
            let gap = last.value - szego_value;
            let decreasing = oracle_values.len() >= 2
                && last.value < oracle_values[oracle_values.len() - 2].value
                && gap > -opts.tol;
            (gap, gap.abs() < opts.tol || decreasing)
        }
    };
    Ok(PredictionReport {
        q,
        szego_value,
        szego_method: gm.method,
        oracle_values,
        converged,
        gap,
    })
}

/// [`predict_tq`] with `α` read off the measure.
pub fn predict_tq_from_measure(
    nu: &SpectralMeasure,
    q: usize,
    depths: &[usize],
    opts: &PredictOptions,
) -> Result<PredictionReport> {
    let n_max = depths.iter().copied().max().unwrap_or(0);
    predict_tq(&alpha_from_measure(nu, q, n_max)?, Some(nu), depths, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tq1Prediction {
    pub q: usize,
    /// `√(q·GM − (q−1)μ(𝕋))`, absent when the criterion fails.
    pub value: Option<f64>,
    pub valid: bool,
    pub radicand: f64,
    /// Set when a radicand within `tol` below zero was clipped to 0.
    pub clipped: bool,
    pub criterion: CriterionReport,
}

/// Prediction distance of the root on `T(q;1)`.
pub fn predict_tq1(mu: &SpectralMeasure, q: usize, grid: usize, tol: f64) -> Result<Tq1Prediction> {
    let criterion = tq1_criterion(mu, q, grid, tol)?;
    let qf = q as f64;
    let radicand = qf * criterion.lhs - (qf - 1.0) * criterion.total_mass;
    let valid = criterion.holds;
    let clipped = valid && radicand < 0.0;
    Ok(Tq1Prediction {
        q,
        value: valid.then(|| radicand.max(0.0).sqrt()),
        valid,
        radicand,
        clipped,
        criterion,
    })
}
