//! Szegő geometric means `exp(∫ log w dm)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::measure::{Density, SpectralMeasure};
use super::trig::TrigPoly;

/// Values are clipped below at this floor before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

/// Fraction of floored grid points above which the mean is reported as 0.
pub const VANISHING_FRACTION: f64 = 0.01;

/// Default quadrature grid.
pub const DEFAULT_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SzegoMethod {
    /// Rectangle rule on a uniform grid.
    Quadrature,
    /// Jensen's formula on the roots of a trig-poly density.
    Jensen,
    /// No absolutely continuous part.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoMean {
    /// `exp(∫ log w dm)`, or 0 when the density vanishes on a set of positive measure.
    pub value: f64,
    /// `∫ log w dm` (−∞ when `value` is 0).
    pub log_mean: f64,
    /// Fraction of grid points clipped at [`LOG_FLOOR`].
    pub floored_fraction: f64,
    pub vanishing: bool,
    pub method: SzegoMethod,
}

impl SzegoMean {
    fn vanishing(floored_fraction: f64, method: SzegoMethod) -> Self {
        SzegoMean {
            value: 0.0,
            log_mean: f64::NEG_INFINITY,
            floored_fraction,
            vanishing: true,
            method,
        }
    }
}

/// Rectangle-rule geometric mean of equispaced samples of a non-negative function.
pub fn szego_mean_samples(values: &[f64]) -> SzegoMean {
    if values.is_empty() {
        return SzegoMean::vanishing(1.0, SzegoMethod::Empty);
    }
    let mut floored = 0usize;
    let mut sum = 0.0;
    for &v in values {
        if v <= LOG_FLOOR {
            floored += 1;
        }
        sum += v.max(LOG_FLOOR).ln();
    }
    let fraction = floored as f64 / values.len() as f64;
    if fraction > VANISHING_FRACTION {
        return SzegoMean::vanishing(fraction, SzegoMethod::Quadrature);
    }
    let log_mean = sum / values.len() as f64;
    SzegoMean {
        value: log_mean.exp(),
        log_mean,
        floored_fraction: fraction,
        vanishing: false,
        method: SzegoMethod::Quadrature,
    }
}

/// `∫ log w dm` for a real trig-poly density `w`, by Jensen's formula:
/// with `P(z) = z^N w(z)` of degree `2N`, the integral equals
/// `log|c_N| + Σ log max(1, |ρ_k|)` over the roots `ρ_k` of `P`.
///
/// Returns `None` if the root finder fails.
pub fn trig_log_mean(w: &TrigPoly) -> Option<f64> {
    let tiny = 1e-14 * w.wiener_norm().max(f64::MIN_POSITIVE);
    let degree = w
        .iter()
        .filter(|(_, c)| c.norm() > tiny)
        .map(|(n, _)| n.unsigned_abs())
        .max()?;
    if degree == 0 {
        let c0 = w.coeff(0).re;
        return Some(if c0 > 0.0 { c0.ln() } else { f64::NEG_INFINITY });
    }
    let n = degree as i64;
    let d = 2 * degree as usize;
    let lead = w.coeff(n);
    if lead.norm() <= tiny {
        return None;
    }
    // Companion matrix of the monic polynomial P(z)/c_N, coefficients c_{k-N} for k = 0..2N.
    let mut companion = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 0..d {
        companion[(k, d - 1)] = -w.coeff(k as i64 - n) / lead;
    }
    let roots = companion.schur().eigenvalues()?;
    let outside: f64 = roots.iter().map(|z| z.norm().ln().max(0.0)).sum();
    Some(lead.norm().ln() + outside)
}

/// Geometric mean of a density, choosing the exact Jensen route for trig
/// polynomials and the rectangle rule on `grid` points otherwise.
pub fn szego_mean(density: &Density, grid: usize) -> SzegoMean {
    if let Density::Trig(p) = density {
        if let Some(log_mean) = trig_log_mean(p) {
            return if log_mean.is_finite() {
                SzegoMean {
                    value: log_mean.exp(),
                    log_mean,
                    floored_fraction: 0.0,
                    vanishing: false,
                    method: SzegoMethod::Jensen,
                }
            } else {
                SzegoMean::vanishing(1.0, SzegoMethod::Jensen)
            };
        }
    }
    let values: Vec<f64> = SpectralMeasure::new(Vec::new(), Some(density.clone()))
        .map(|m| m.density_on_grid(grid))
        .unwrap_or_default();
    szego_mean_samples(&values)
}

/// Geometric mean of the absolutely continuous part; atoms are ignored.
pub fn ac_szego_mean(mu: &SpectralMeasure, grid: usize) -> SzegoMean {
    match mu.density() {
        Some(d) => szego_mean(d, grid),
        None => SzegoMean::vanishing(1.0, SzegoMethod::Empty),
    }
}

/// `∫ log(P_r ∗ μ) dm ≥ log(1 − r²)` for a probability measure `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonLogBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn poisson_log_bound(mu: &SpectralMeasure, r: f64, grid: usize, tol: f64) -> crate::Result<PoissonLogBound> {
    let smoothed = mu.normalized()?.poisson_convolve(r)?;
    let lhs = szego_mean_samples(&smoothed.density_on_grid(grid)).log_mean;
    let rhs = (1.0 - r * r).ln();
    Ok(PoissonLogBound {
        lhs,
        rhs,
        holds: lhs >= rhs - tol,
    })
}
