//! Hankel operators `H_φ(f) = R₋(φf)` with Poisson-type symbols, the weighted
//! sup-norm inequalities they satisfy, and boundedness tests `H² → L^∞`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{grid_angle, Density, SpectralMeasure, TrigPoly};
use crate::error::{Error, Result};

/// Symbol truncation used for grid densities.
pub const DEFAULT_N_SYM: usize = 128;

/// Default evaluation grid for the sup-norms.
pub const DEFAULT_HANKEL_GRID: usize = 8192;

/// Default slack, relative to `max(1, bound)`.
pub const HANKEL_TOL: f64 = 1e-9;

/// `Σ_{k≤0} (Σ_n φ̂(n) a_{k−n}) e^{ikθ}`, computed on the finite supports.
pub fn hankel_apply(phi: &TrigPoly, f: &TrigPoly) -> TrigPoly {
    TrigPoly::from_coeffs(phi.iter().flat_map(|(n, c)| {
        f.iter()
            .filter(move |(m, _)| n + m <= 0)
            .map(move |(m, a)| (n + m, c * a))
    }))
}

/// `P_s ∗ H_{P_ρ∗μ}(f)` as a pointwise-evaluable function.
///
/// Atoms use the closed form `mass·A(t)/(1 − sρ e^{i(t−θ)})` with
/// `A(t) = Σ a_n ρ^n e^{int}`; trig densities are exact trig polynomials; grid
/// densities are truncated to `|n| ≤ n_sym`, with `error_bound` bounding the
/// dropped part uniformly in `θ`.
#[derive(Debug, Clone)]
struct HankelField {
    atoms: Vec<(f64, f64, Complex64)>,
    polys: Vec<TrigPoly>,
    smoothing: f64,
    error_bound: f64,
}

impl HankelField {
    fn new(mu: &SpectralMeasure, rho: f64, smoothing: f64, f: &TrigPoly, n_sym: usize) -> Self {
        let mut field = HankelField {
            atoms: Vec::new(),
            polys: Vec::new(),
            smoothing,
            error_bound: 0.0,
        };
        field.collect(mu, rho, f, n_sym);
        field
    }

    fn collect(&mut self, mu: &SpectralMeasure, rho: f64, f: &TrigPoly, n_sym: usize) {
        for atom in mu.atom_list() {
            let amp: Complex64 = f
                .iter()
                .map(|(n, a)| a * rho.powi(n as i32) * Complex64::from_polar(1.0, n as f64 * atom.theta))
                .sum();
            self.atoms.push((atom.theta, rho, amp * atom.mass));
        }
        match mu.density() {
            None => {}
            Some(Density::Trig(p)) => self
                .polys
                .push(hankel_apply(&p.poisson_smooth(rho), f).poisson_smooth(self.smoothing)),
            Some(Density::Grid(g)) => {
                let n = n_sym as i64;
                let phi =
                    TrigPoly::from_coeffs((-n..=n).map(|k| (k, g.fourier(k) * rho.powi(k.unsigned_abs() as i32))));
                self.polys.push(hankel_apply(&phi, f).poisson_smooth(self.smoothing));
                let mass = g.fourier(0).re;
                self.error_bound += 2.0 * mass * rho.powi(n_sym as i32 + 1) / (1.0 - rho) * f.wiener_norm();
            }
            Some(Density::Poisson { r, base }) => self.collect(base, rho * r, f, n_sym),
        }
    }

    fn eval(&self, theta: f64) -> Complex64 {
        let atoms: Complex64 = self
            .atoms
            .iter()
            .map(|&(t, rho, amp)| amp / (1.0 - Complex64::from_polar(self.smoothing * rho, t - theta)))
            .sum();
        atoms + self.polys.iter().map(|p| p.eval(theta)).sum::<Complex64>()
    }
}

/// Outcome of a grid verification of `sup_θ |LHS(θ)|/weight(θ) ≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    /// `max` over the grid of `|LHS|/weight`.
    pub sup_ratio: f64,
    /// Right-hand side: `constant · ‖f‖_{L²(φ)}`.
    pub bound: f64,
    pub constant: f64,
    pub f_norm: f64,
    /// `bound − sup_ratio − truncation_error`.
    pub slack: f64,
    pub holds: bool,
    pub argmax_theta: f64,
    /// Uniform bound on how far the computed ratio may sit below the exact one.
    pub truncation_error: f64,
    pub min_weight: f64,
    pub grid: usize,
    pub tol: f64,
    /// The sup is taken over grid points only, so `holds` is a grid verdict.
    pub grid_certified: bool,
}

fn grid_report(
    grid: usize,
    constant: f64,
    f_norm: f64,
    ratio_error: f64,
    point: impl Fn(f64) -> (f64, f64) + Sync,
) -> InequalityReport {
    let samples: Vec<(f64, f64, f64)> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let theta = grid_angle(j, grid);
            let (lhs, weight) = point(theta);
            (theta, if lhs == 0.0 { 0.0 } else { lhs / weight }, weight)
        })
        .collect();
    let (argmax_theta, sup_ratio) =
        samples.iter().fold(
            (0.0, f64::NEG_INFINITY),
            |best, &(t, r, _)| if r > best.1 { (t, r) } else { best },
        );
    let min_weight = samples.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let bound = constant * f_norm;
    let truncation_error = if min_weight > 0.0 {
        ratio_error / min_weight
    } else {
        f64::INFINITY
    };
    let tol = HANKEL_TOL * bound.max(1.0);
    InequalityReport {
        sup_ratio,
        bound,
        constant,
        f_norm,
        slack: bound - sup_ratio - truncation_error,
        holds: sup_ratio + truncation_error <= bound + tol,
        argmax_theta,
        truncation_error,
        min_weight,
        grid,
        tol,
        grid_certified: true,
    }
}

fn require_h20(f: &TrigPoly) -> Result<()> {
    if !f.is_analytic() || f.coeff(0) != Complex64::default() {
        return Err(Error::InvalidArgument(
            "f must be an analytic trig polynomial with f̂(0) = 0".into(),
        ));
    }
    Ok(())
}

fn require_mass(mu: &SpectralMeasure) -> Result<()> {
    if mu.total_mass().partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidMeasure(
            "the measure must have positive total mass".into(),
        ));
    }
    Ok(())
}

/// `‖H_φ(f)/√φ‖_∞ ≤ r/√(1−r²)·‖f‖_{L²(φ)}` for `φ = P_r ∗ μ`.
pub fn two_weight_check(
    mu: &SpectralMeasure,
    r: f64,
    f: &TrigPoly,
    grid: usize,
    n_sym: usize,
) -> Result<InequalityReport> {
    require_mass(mu)?;
    require_h20(f)?;
    let phi = mu.poisson_convolve(r)?;
    let field = HankelField::new(mu, r, 1.0, f, n_sym);
    let constant = r / (1.0 - r * r).sqrt();
    Ok(grid_report(
        grid,
        constant,
        f.l2_norm(&phi),
        field.error_bound,
        |theta| (field.eval(theta).norm(), mu.smoothed_value(r, theta).sqrt()),
    ))
}

/// `‖E_N[H_φ(B₀f)] / √(E_N[|B₀|²φ])‖_∞ ≤ ‖f‖_{L²(φ)}` for `φ = P_{1/√2} ∗ μ`.
pub fn en_inequality_check(
    mu: &SpectralMeasure,
    b0: &TrigPoly,
    f: &TrigPoly,
    n: usize,
    grid: usize,
    n_sym: usize,
) -> Result<InequalityReport> {
    require_mass(mu)?;
    require_h20(f)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if b0.is_zero() {
        return Err(Error::InvalidArgument("B₀ must not vanish identically".into()));
    }
    if !b0.is_analytic() || b0.max_index().unwrap_or(0) >= n as i64 {
        return Err(Error::InvalidArgument(format!(
            "B₀ must be analytic of degree at most N − 1 = {}",
            n - 1
        )));
    }
    let r = FRAC_1_SQRT_2;
    let phi = mu.poisson_convolve(r)?;
    let field = HankelField::new(mu, r, 1.0, &b0.mul(f), n_sym);
    let nf = n as f64;
    let report = grid_report(grid, 1.0, f.l2_norm(&phi), field.error_bound, |theta| {
        let mut num = Complex64::default();
        let mut den = 0.0;
        for k in 0..n {
            let t = (theta + 2.0 * PI * k as f64) / nf;
            num += field.eval(t);
            den += b0.eval(t).norm_sqr() * mu.smoothed_value(r, t);
        }
        ((num / nf).norm(), (den / nf).sqrt())
    });
    if report.min_weight <= 0.0 {
        return Err(Error::InvalidArgument("E_N[|B₀|²φ] vanishes on the grid".into()));
    }
    Ok(report)
}

/// `‖P_{1/√2}∗H_φ(f) / √(P_{1/√2}∗φ)‖_∞ ≤ ‖f‖_{L²(φ)}` for `φ = P_{√(2/3)} ∗ μ`.
pub fn smoothed_inequality_check(
    mu: &SpectralMeasure,
    f: &TrigPoly,
    grid: usize,
    n_sym: usize,
) -> Result<InequalityReport> {
    require_mass(mu)?;
    require_h20(f)?;
    let r = (2.0f64 / 3.0).sqrt();
    let s = FRAC_1_SQRT_2;
    let phi = mu.poisson_convolve(r)?;
    let field = HankelField::new(mu, r, s, f, n_sym);
    Ok(grid_report(grid, 1.0, f.l2_norm(&phi), field.error_bound, |theta| {
        (field.eval(theta).norm(), mu.smoothed_value(r * s, theta).sqrt())
    }))
}

/// `sup_θ (Σ_{n=0}^{n_trunc} |Σ_{m≤−n} φ̂(m) e^{imθ}|²)^{1/2}` over the grid.
pub fn h2_linf_norm(phi: &TrigPoly, n_trunc: usize, grid: usize) -> f64 {
    let lowest = phi.min_index().unwrap_or(0).min(0);
    (0..grid)
        .into_par_iter()
        .map(|j| {
            let theta = grid_angle(j, grid);
            let mut tail = Complex64::default();
            let mut total = 0.0;
            // Walk m upward from the lowest index; after adding m = −n the tail is Σ_{m≤−n}.
            for m in lowest..=0 {
                tail += phi.coeff(m) * Complex64::from_polar(1.0, m as f64 * theta);
                if (-m) as usize <= n_trunc {
                    total += tail.norm_sqr();
                }
            }
            total.sqrt()
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTest {
    /// Partial sum at the largest truncation.
    pub value: f64,
    pub verdict: Series,
    /// Ratio of the last two doubling increments (absent for finite symbols).
    pub increment_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    /// `Σ_{m≤0} (1+m²)^{1/2} |φ̂(m)|²`, finiteness necessary.
    pub necessary_h_half: SeriesTest,
    /// `Σ_{m≤0} (1+m²) |φ̂(m)|²`, finiteness sufficient.
    pub sufficient_h_one: SeriesTest,
    /// `Σ_{n≥0} (Σ_{m≤−n} φ̂(m))²`, exact when all coefficients of `R₋φ` are positive.
    pub positive_coefficient: Option<SeriesTest>,
    pub tri_state: Boundedness,
    /// Set for coefficient families evaluated at finite truncations.
    pub truncated: bool,
}

fn tri_state(h_half: Series, h_one: Series, pos: Option<Series>) -> Boundedness {
    match pos {
        Some(Series::Convergent) => Boundedness::Bounded,
        Some(Series::Divergent) => Boundedness::Unbounded,
        _ if h_one == Series::Convergent => Boundedness::Bounded,
        _ if h_half == Series::Divergent => Boundedness::Unbounded,
        _ => Boundedness::Inconclusive,
    }
}

fn sobolev_sums(c: &[Complex64]) -> (f64, f64) {
    c.iter().enumerate().fold((0.0, 0.0), |(h, o), (m, z)| {
        let w = 1.0 + (m * m) as f64;
        (h + w.sqrt() * z.norm_sqr(), o + w * z.norm_sqr())
    })
}

fn tail_square_sum(c: &[f64]) -> f64 {
    let mut tail = 0.0;
    let mut total = 0.0;
    for v in c.iter().rev() {
        tail += v;
        total += tail * tail;
    }
    total
}

/// Boundedness of `H_φ: H² → L^∞` for a finite symbol: every series is a finite sum.
pub fn boundedness_conditions(phi: &TrigPoly) -> BoundednessReport {
    let lowest = phi.min_index().unwrap_or(0).min(0);
    // c[m] = φ̂(−m), m ≥ 0.
    let c: Vec<Complex64> = (0..=(-lowest)).map(|m| phi.coeff(-m)).collect();
    let (h, o) = sobolev_sums(&c);
    let finite = |value| SeriesTest {
        value,
        verdict: Series::Convergent,
        increment_ratio: None,
    };
    let positive = c.iter().all(|z| z.im == 0.0 && z.re >= 0.0) && c.iter().any(|z| z.re > 0.0);
    let pos = positive.then(|| finite(tail_square_sum(&c.iter().map(|z| z.re).collect::<Vec<_>>())));
    BoundednessReport {
        necessary_h_half: finite(h),
        sufficient_h_one: finite(o),
        positive_coefficient: pos,
        tri_state: Boundedness::Bounded,
        truncated: false,
    }
}

/// Increment ratio at or below which a doubling sequence of partial sums is read as convergent.
pub const CONVERGENT_RATIO: f64 = 0.75;
/// Increment ratio at or above which it is read as divergent.
pub const DIVERGENT_RATIO: f64 = 0.97;

fn classify(partials: &[f64]) -> SeriesTest {
    let value = *partials.last().expect("at least one truncation");
    let k = partials.len();
    if k < 3 {
        return SeriesTest {
            value,
            verdict: Series::Inconclusive,
            increment_ratio: None,
        };
    }
    let last = partials[k - 1] - partials[k - 2];
    let prev = partials[k - 2] - partials[k - 3];
    let ratio = if prev.abs() > 0.0 {
        last / prev
    } else if last.abs() > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let verdict = if last.abs() <= 1e-12 * value.abs() || ratio <= CONVERGENT_RATIO {
        Series::Convergent
    } else if ratio >= DIVERGENT_RATIO {
        Series::Divergent
    } else {
        Series::Inconclusive
    };
    SeriesTest {
        value,
        verdict,
        increment_ratio: Some(ratio),
    }
}

/// Boundedness for an infinite symbol given by `coeff(m) = φ̂(−m)`, `m ≥ 0`.
///
/// Each series is evaluated at the truncations `2^k`, `k = 4..=log2_max`, and
/// read as convergent or divergent from the ratio of the last two increments.
pub fn boundedness_family(coeff: impl Fn(usize) -> Complex64, log2_max: u32) -> Result<BoundednessReport> {
    if !(6..=24).contains(&log2_max) {
        return Err(Error::InvalidArgument(format!(
            "log2_max = {log2_max} must lie in 6..=24"
        )));
    }
    let c: Vec<Complex64> = (0..=(1usize << log2_max)).map(&coeff).collect();
    let cuts: Vec<usize> = (4..=log2_max).map(|k| 1usize << k).collect();
    let positive = c.iter().all(|z| z.im == 0.0 && z.re >= 0.0) && c.iter().any(|z| z.re > 0.0);
    let mut half = Vec::new();
    let mut one = Vec::new();
    let mut pos = Vec::new();
    for &m in &cuts {
        let (h, o) = sobolev_sums(&c[..=m]);
        half.push(h);
        one.push(o);
        if positive {
            pos.push(tail_square_sum(&c[..=m].iter().map(|z| z.re).collect::<Vec<_>>()));
        }
    }
    let necessary_h_half = classify(&half);
    let sufficient_h_one = classify(&one);
    let positive_coefficient = positive.then(|| classify(&pos));
    Ok(BoundednessReport {
        tri_state: tri_state(
            necessary_h_half.verdict,
            sufficient_h_one.verdict,
            positive_coefficient.map(|p| p.verdict),
        ),
        necessary_h_half,
        sufficient_h_one,
        positive_coefficient,
        truncated: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HlpPairing {
    /// `Σ_{m,n≥1} a_m b_n / max(m, n)`.
    pub pairing: f64,
    /// `4 ‖a‖₂ ‖b‖₂`.
    pub bound: f64,
    pub holds: bool,
}

/// Hilbert-type pairing of two non-negative sequences; `a[0]` is `a_1`.
pub fn hlp_pairing(a: &[f64], b: &[f64]) -> Result<HlpPairing> {
    if a.iter().chain(b).any(|&x| x.is_nan() || x < 0.0) {
        return Err(Error::InvalidArgument("sequences must be non-negative".into()));
    }
    let pairing: f64 = a
        .iter()
        .enumerate()
        .map(|(i, &am)| {
            b.iter()
                .enumerate()
                .map(|(j, &bn)| am * bn / (i.max(j) + 1) as f64)
                .sum::<f64>()
        })
        .sum();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let bound = 4.0 * norm(a) * norm(b);
    Ok(HlpPairing {
        pairing,
        bound,
        holds: pairing <= bound * (1.0 + 1e-12),
    })
}

/// Constant `C` with `Σ_{m≥N} 1/(1+m²) ≤ C/(N+1)` for every `N ≥ 0`.
pub const TAIL_CONSTANT: f64 = 2.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HlpTailSum {
    /// `Σ_{m<M} (1+m²)^{-1} (Σ_{l≤m} |a_l|)²` after scaling to `‖a‖₂ ≤ 1`.
    pub sum: f64,
    /// `C · Σ_{l,l'} |a_l||a_{l'}| / (max(l,l')+1)`, an upper bound for every `M`.
    pub witness: f64,
    /// `4C`, the Hilbert-inequality bound on the witness.
    pub bound: f64,
    pub scale: f64,
}

pub fn hlp_tail_sum(a: &[Complex64], terms: usize) -> HlpTailSum {
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = if norm > 1.0 { 1.0 / norm } else { 1.0 };
    let abs: Vec<f64> = a.iter().map(|z| z.norm() * scale).collect();
    let mut prefix = 0.0;
    let sum = (0..terms)
        .map(|m| {
            prefix += abs.get(m).copied().unwrap_or(0.0);
            prefix * prefix / (1.0 + (m * m) as f64)
        })
        .sum();
    let pairing = hlp_pairing(&abs, &abs).map(|p| p.pairing).unwrap_or(0.0);
    HlpTailSum {
        sum,
        witness: TAIL_CONSTANT * pairing,
        bound: 4.0 * TAIL_CONSTANT,
        scale,
    }
}
