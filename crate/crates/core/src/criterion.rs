//! Admissibility tests for spectral measures on `T(q;1)` and on general trees.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{ac_szego_mean, szego_mean_samples, SpectralMeasure, SzegoMethod, TrigPoly};
use crate::error::{Error, Result};
use crate::kernel::{psd_check, HermitianMatrix, PSD_TOL};
use crate::tree::{tq1_truncation, GeneralRootedTree};

/// Default slack in `lhs ≥ rhs − tol`.
pub const CRITERION_TOL: f64 = 1e-9;

/// Largest branch length accepted by [`cn_oracle`].
pub const CN_MAX_ORDER: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub q: usize,
    /// Geometric mean of the absolutely continuous density.
    pub lhs: f64,
    /// `(1 − 1/q)·μ(𝕋)`, atoms included.
    pub rhs: f64,
    pub holds: bool,
    /// `lhs − rhs`.
    pub margin: f64,
    pub total_mass: f64,
    pub atom_mass: f64,
    pub tol: f64,
    pub szego_method: SzegoMethod,
}

/// `exp(∫ log(dμ_ac/dm) dm) ≥ (1 − 1/q)·μ(𝕋)`.
pub fn tq1_criterion(mu: &SpectralMeasure, q: usize, grid: usize, tol: f64) -> Result<CriterionReport> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("arity q = {q} must be at least 2")));
    }
    let gm = ac_szego_mean(mu, grid);
    let total_mass = mu.total_mass();
    let rhs = (1.0 - 1.0 / q as f64) * total_mass;
    Ok(CriterionReport {
        q,
        lhs: gm.value,
        rhs,
        holds: gm.value >= rhs - tol,
        margin: gm.value - rhs,
        total_mass,
        atom_mass: mu.atom_mass(),
        tol,
        szego_method: gm.method,
    })
}

/// The `(1+qn)×(1+qn)` kernel of `μ` on `T(q;1)` cut at branch length `n`,
/// assembled block by block: corner `μ̂(0)`, `q` diagonal copies of
/// `[μ̂(j−i)]_{1≤i,j≤n}`, root row `(μ̂(1),…,μ̂(n))` into each block, zeros across branches.
pub fn build_cn(mu: &SpectralMeasure, q: usize, n: usize) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("branch length n must be at least 1".into()));
    }
    let labels = tq1_truncation(q, n)?.iter().map(|v| v.to_string()).collect();
    let coeffs: Vec<Complex64> = (0..=n as i64).map(|k| mu.fourier(k)).collect();
    let c = |k: i64| {
        if k >= 0 {
            coeffs[k as usize]
        } else {
            coeffs[(-k) as usize].conj()
        }
    };
    let size = 1 + q * n;
    let mut data = DMatrix::<Complex64>::zeros(size, size);
    data[(0, 0)] = c(0);
    for b in 0..q {
        let off = 1 + b * n;
        for i in 0..n {
            data[(0, off + i)] = c(i as i64 + 1);
            data[(off + i, 0)] = c(-(i as i64 + 1));
            for j in 0..n {
                data[(off + i, off + j)] = c(j as i64 - i as i64);
            }
        }
    }
    HermitianMatrix::new(data, labels)
}

/// `μ̂(0)·blockdiag(𝒯_n, …, 𝒯_n) − w* w` with `w = (v_n, …, v_n)`; PSD iff [`build_cn`] is (when `μ̂(0) > 0`).
pub fn cn_schur_matrix(mu: &SpectralMeasure, q: usize, n: usize) -> Result<HermitianMatrix> {
    let cn = build_cn(mu, q, n)?;
    let a = cn.get(0, 0);
    let m = q * n;
    let data = DMatrix::from_fn(m, m, |i, j| {
        a * cn.get(i + 1, j + 1) - cn.get(i + 1, 0) * cn.get(0, j + 1)
    });
    let labels = cn.labels()[1..].to_vec();
    HermitianMatrix::new(data, labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnOracle {
    pub q: usize,
    pub all_psd: bool,
    pub first_failure: Option<usize>,
    /// `λ_min(C_n)` for `n = 1..=n_max`.
    pub min_eigs: Vec<f64>,
}

/// PSD sweep of [`build_cn`] over `n = 1..=n_max`.
pub fn cn_oracle(mu: &SpectralMeasure, q: usize, n_max: usize) -> Result<CnOracle> {
    if n_max == 0 || n_max > CN_MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "n_max = {n_max} must lie in 1..={CN_MAX_ORDER}"
        )));
    }
    let reports: Vec<_> = (1..=n_max)
        .into_par_iter()
        .map(|n| build_cn(mu, q, n).map(|c| psd_check(&c, PSD_TOL)))
        .collect::<Result<_>>()?;
    let first_failure = reports.iter().position(|r| !r.psd).map(|i| i + 1);
    Ok(CnOracle {
        q,
        all_psd: first_failure.is_none(),
        first_failure,
        min_eigs: reports.iter().map(|r| r.min_eigenvalue).collect(),
    })
}

/// Admissible range for a two-level density `a·1_A + b·1_{𝕋∖A}` with `m(A) = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelBounds {
    pub q: usize,
    /// `(q−1)/(q+√(2q−1))`, the lower endpoint for `√(a/b)`.
    pub lower: f64,
    /// `(q+√(2q−1))/(q−1)`, the upper endpoint for `√(a/b)`.
    pub upper: f64,
    /// `lower²`, the lower endpoint for `a/b`.
    pub ratio_lower: f64,
    /// `upper²`, the upper endpoint for `a/b`.
    pub ratio_upper: f64,
}

pub fn two_level_bounds(q: usize) -> Result<TwoLevelBounds> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("arity q = {q} must be at least 2")));
    }
    let qf = q as f64;
    let lower = (qf - 1.0) / (qf + (2.0 * qf - 1.0).sqrt());
    Ok(TwoLevelBounds {
        q,
        lower,
        upper: 1.0 / lower,
        ratio_lower: lower * lower,
        ratio_upper: 1.0 / (lower * lower),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelCheck {
    pub a: f64,
    pub b: f64,
    /// `√(ab)`.
    pub geometric_mean: f64,
    /// `(a+b)/2`.
    pub mass: f64,
    /// `geometric_mean / mass`, compared with `1 − 1/q`.
    pub ratio: f64,
    pub threshold: f64,
    pub holds: bool,
}

/// Closed-form criterion for a two-level density.
pub fn two_level_check(a: f64, b: f64, q: usize, tol: f64) -> Result<TwoLevelCheck> {
    if !(a > 0.0 && b > 0.0) || q < 2 {
        return Err(Error::InvalidArgument(format!(
            "need a, b > 0 and q ≥ 2 (a = {a}, b = {b}, q = {q})"
        )));
    }
    let geometric_mean = (a * b).sqrt();
    let mass = (a + b) / 2.0;
    let threshold = 1.0 - 1.0 / q as f64;
    Ok(TwoLevelCheck {
        a,
        b,
        geometric_mean,
        mass,
        ratio: geometric_mean / mass,
        threshold,
        holds: geometric_mean >= threshold * mass - tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNormReport {
    /// `sup|g| ≤ ½ log(q/(q−1))`.
    pub sufficient: bool,
    pub sup: f64,
    pub bound: f64,
    /// The criterion for `e^g dm`, evaluated independently of `sufficient`.
    pub criterion: CriterionReport,
}

/// Sufficient condition `‖g‖_∞ ≤ ½ log(q/(q−1))` for `e^g dm`, with the criterion itself evaluated on the grid.
pub fn sup_norm_sufficient(g: &TrigPoly, q: usize, grid: usize, tol: f64) -> Result<SupNormReport> {
    if g.iter()
        .any(|(n, c)| (g.coeff(-n) - c.conj()).norm() > 1e-12 * g.wiener_norm().max(1.0))
    {
        return Err(Error::InvalidArgument("g must be real-valued".into()));
    }
    let values: Vec<f64> = g.eval_grid(grid).iter().map(|z| z.re).collect();
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = 0.5 * (q as f64 / (q as f64 - 1.0)).ln();
    let density: Vec<f64> = values.iter().map(|v| v.exp()).collect();
    let lhs = szego_mean_samples(&density);
    let total_mass = density.iter().sum::<f64>() / grid as f64;
    let rhs = (1.0 - 1.0 / q as f64) * total_mass;
    Ok(SupNormReport {
        sufficient: sup <= bound,
        sup,
        bound,
        criterion: CriterionReport {
            q,
            lhs: lhs.value,
            rhs,
            holds: lhs.value >= rhs - tol,
            margin: lhs.value - rhs,
            total_mass,
            atom_mass: 0.0,
            tol,
            szego_method: lhs.method,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierBoundEntry {
    pub n: usize,
    /// `|ν̂(n)|²` after normalizing to `ν̂(0) = 1`.
    pub coeff_sq: f64,
    pub delta: u128,
    /// `1/Δ_n`.
    pub bound: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierBoundReport {
    pub violations: Vec<usize>,
    pub entries: Vec<FourierBoundEntry>,
}

/// Flags every `1 ≤ n ≤ n_max` with `|ν̂(n)|² > 1/Δ_n + tol`; levels with `Δ_n = 0` are skipped.
pub fn fourier_bound_check(
    nu: &SpectralMeasure,
    tree: &GeneralRootedTree,
    n_max: usize,
    tol: f64,
) -> Result<FourierBoundReport> {
    let nu = nu.normalized()?;
    let deltas = tree.delta_sequence(n_max);
    let entries: Vec<FourierBoundEntry> = (1..=n_max)
        .filter(|&n| deltas[n - 1] > 0)
        .map(|n| {
            let coeff_sq = nu.fourier(n as i64).norm_sqr();
            let delta = deltas[n - 1];
            let bound = 1.0 / delta as f64;
            FourierBoundEntry {
                n,
                coeff_sq,
                delta,
                bound,
                violated: coeff_sq > bound + tol,
            }
        })
        .collect();
    Ok(FourierBoundReport {
        violations: entries.iter().filter(|e| e.violated).map(|e| e.n).collect(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{two_level_density, Atom};
    use crate::kernel::branching_kernel;
    use crate::tree::TreeTruncation;

    fn cos_density(c: &[f64]) -> SpectralMeasure {
        SpectralMeasure::trig_density(TrigPoly::cosine_series(c)).unwrap()
    }

    #[test]
    fn tq1_criterion_examples() {
        let r = tq1_criterion(&SpectralMeasure::lebesgue(), 2, 4096, CRITERION_TOL).unwrap();
        assert!(r.holds && r.lhs == 1.0 && r.rhs == 0.5);
        let boundary = tq1_criterion(&cos_density(&[2.0, 2.0]), 2, 4096, CRITERION_TOL).unwrap();
        assert!(boundary.holds && (boundary.lhs - boundary.rhs).abs() < 1e-12);
        let fails = tq1_criterion(&cos_density(&[2.0, 2.0]), 3, 4096, CRITERION_TOL).unwrap();
        assert!(!fails.holds && (fails.rhs - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn atoms_only_raise_the_right_side() {
        let mu = SpectralMeasure::lebesgue();
        let base = tq1_criterion(&mu, 3, 4096, CRITERION_TOL).unwrap();
        let bumped = tq1_criterion(&mu.with_atom(1.0, 0.3).unwrap(), 3, 4096, CRITERION_TOL).unwrap();
        assert_eq!(base.lhs, bumped.lhs);
        assert!((bumped.rhs - base.rhs - (2.0 / 3.0) * 0.3).abs() < 1e-15);
    }

    #[test]
    fn build_cn_examples() {
        let id = build_cn(&SpectralMeasure::lebesgue(), 2, 1).unwrap();
        assert_eq!(id.data(), HermitianMatrix::identity(3).data());
        assert_eq!(id.labels(), ["e", "s1", "s2"]);

        let atom = build_cn(&SpectralMeasure::atom(0.0, 1.0), 2, 1).unwrap();
        let want = [[1.0, 1.0, 1.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]];
        for (i, row) in want.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                assert_eq!(atom.get(i, j).re, w);
            }
        }
        let r = psd_check(&atom, PSD_TOL);
        assert!(!r.psd && (r.min_eigenvalue - (1.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn build_cn_agrees_with_the_branching_kernel() {
        let mu = SpectralMeasure::new(
            vec![Atom { theta: 0.7, mass: 0.4 }],
            Some(crate::circle::Density::Trig(TrigPoly::cosine_series(&[1.0, 0.3, -0.2]))),
        )
        .unwrap();
        let cn = build_cn(&mu, 3, 4).unwrap();
        let k = branching_kernel(&tq1_truncation(3, 4).unwrap(), |d| mu.fourier(d as i64));
        assert_eq!(cn.labels(), k.labels());
        for i in 0..cn.size() {
            for j in 0..cn.size() {
                assert!((cn.get(i, j) - k.get(i, j)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cn_oracle_examples() {
        let m = cn_oracle(&SpectralMeasure::lebesgue(), 3, 8).unwrap();
        assert!(m.all_psd && m.min_eigs.iter().all(|&l| (l - 1.0).abs() < 1e-12));
        let atom = cn_oracle(&SpectralMeasure::atom(0.0, 1.0), 2, 4).unwrap();
        assert_eq!(atom.first_failure, Some(1));
        let boundary = cn_oracle(&cos_density(&[2.0, 2.0]), 2, 32).unwrap();
        assert!(boundary.all_psd);
        assert!(boundary.min_eigs.iter().all(|&l| l >= -1e-6));
        assert!(boundary.min_eigs[31] < boundary.min_eigs[0]);
        // One-step prediction error of |1+e^{iθ}|² from n past values is (n+2)/(n+1);
        // the Schur complement 2 − 3(2 − (n+2)/(n+1)) first turns negative at n = 3.
        let q3 = cn_oracle(&cos_density(&[2.0, 2.0]), 3, 8).unwrap();
        assert_eq!(q3.first_failure, Some(3));
        assert!(cn_oracle(&SpectralMeasure::lebesgue(), 2, CN_MAX_ORDER + 1).is_err());
    }

    #[test]
    fn schur_form_matches_cn() {
        for (mu, q) in [
            (cos_density(&[2.0, 2.0]), 3),
            (cos_density(&[1.0, 0.4]), 2),
            (SpectralMeasure::atom(0.0, 1.0), 2),
        ] {
            for n in 1..=5 {
                let a = psd_check(&build_cn(&mu, q, n).unwrap(), PSD_TOL).psd;
                let b = psd_check(&cn_schur_matrix(&mu, q, n).unwrap(), PSD_TOL).psd;
                assert_eq!(a, b, "n = {n}");
            }
        }
    }

    #[test]
    fn two_level_examples() {
        let b = two_level_bounds(2).unwrap();
        assert!((b.lower - 1.0 / (2.0 + 3f64.sqrt())).abs() < 1e-15);
        assert!((b.lower - 0.26795).abs() < 1e-5);
        let eq = two_level_check(b.ratio_lower, 1.0, 2, 0.0).unwrap();
        assert!((eq.ratio - eq.threshold).abs() < 1e-12);
        let up = two_level_check(b.ratio_upper, 1.0, 2, 0.0).unwrap();
        assert!((up.ratio - up.threshold).abs() < 1e-12);
        assert!(two_level_check(1.0, 1.0, 2, 0.0).unwrap().ratio == 1.0);
        let t = two_level_check(0.1, 1.0, 2, 0.0).unwrap();
        assert!(t.holds && (t.ratio - 0.575).abs() < 1e-3);
        let t = two_level_check(0.05, 1.0, 2, 0.0).unwrap();
        assert!(!t.holds && (t.ratio - 0.4259).abs() < 1e-3);
        // The grid representation gives the same numbers.
        let mu = two_level_density(0.1, 1.0, 4096).unwrap();
        let r = tq1_criterion(&mu, 2, 4096, 0.0).unwrap();
        assert!((r.lhs - 0.1f64.sqrt()).abs() < 1e-12 && (r.total_mass - 0.55).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_examples() {
        let zero = sup_norm_sufficient(&TrigPoly::zero(), 2, 1024, CRITERION_TOL).unwrap();
        assert!(zero.sufficient && zero.criterion.holds);
        let small = sup_norm_sufficient(&TrigPoly::cosine_series(&[0.0, 0.3]), 2, 1024, CRITERION_TOL).unwrap();
        assert!(small.sufficient && small.criterion.holds);
        assert!((small.bound - 0.5 * 2f64.ln()).abs() < 1e-15);
        let big = sup_norm_sufficient(&TrigPoly::cosine_series(&[0.0, 0.5]), 2, 1024, CRITERION_TOL).unwrap();
        assert!(!big.sufficient);
        // GM = 1, mass = I₀(0.5) ≈ 1.0635, so the criterion still holds.
        assert!(big.criterion.holds);
        assert!(sup_norm_sufficient(&TrigPoly::monomial(1, 1.0), 2, 64, CRITERION_TOL).is_err());
    }

    #[test]
    fn fourier_bound_examples() {
        let t2 = TreeTruncation::new(2, 6).unwrap().to_general();
        let nu = SpectralMeasure::lebesgue()
            .scaled(0.2)
            .unwrap()
            .with_atom(0.0, 0.8)
            .unwrap();
        // ν̂(n) = 0.8 for every n ≠ 0: 0.64 > 1/2 at n = 1, and every later level too.
        assert_eq!(
            fourier_bound_check(&nu, &t2, 4, 1e-12).unwrap().violations,
            vec![1, 2, 3, 4]
        );
        let smooth_m = SpectralMeasure::lebesgue().poisson_convolve(0.5f64.sqrt()).unwrap();
        assert!(fourier_bound_check(&smooth_m, &t2, 6, 1e-12)
            .unwrap()
            .violations
            .is_empty());
        let smooth_atom = SpectralMeasure::atom(0.0, 1.0).poisson_convolve(0.5f64.sqrt()).unwrap();
        let r = fourier_bound_check(&smooth_atom, &t2, 6, 1e-12).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.entries.iter().all(|e| (e.coeff_sq - e.bound).abs() < 1e-12));
    }
}
