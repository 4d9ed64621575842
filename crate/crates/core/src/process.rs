//! Gaussian processes on truncated trees: the explicit averaging construction,
//! a generic eigen-factor sampler, spatial averages and empirical covariances.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{psd_check, HermitianMatrix, HpdSequence, PSD_TOL};
use crate::tree::{relation, Relation, TreeTruncation, Vertex, DEFAULT_VERTEX_CAP};

/// Omitted-variance target for the default tail cutoff.
pub const TAIL_TARGET: f64 = 1e-6;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

/// Description of the per-sample random stream; part of the reproducibility contract.
pub const RNG_SCHEDULE: &str = "ChaCha8Rng::seed_from_u64(seed), set_stream(sample_index), StandardNormal";

fn sample_rng(seed: u64, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample as u64);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum XrMethod {
    /// Backward recursion `X_σ = G_σ + (r/√q) Σ_i X_{σ s_i}`, with each depth-`D`
    /// vertex drawn directly with its exact series variance `Σ_{k≤K} r^{2k}`.
    #[default]
    Recursive,
    /// Draw every `G_τ` with `|τ| ≤ D+K` and sum the series literally.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub q: usize,
    pub r: f64,
    pub depth: usize,
    /// Series cutoff `K` below the deepest simulated level; `None` picks [`default_tail`].
    pub tail: Option<usize>,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub method: XrMethod,
}

impl SimulationConfig {
    pub fn new(q: usize, r: f64, depth: usize, n_samples: usize, seed: u64) -> Self {
        SimulationConfig {
            q,
            r,
            depth,
            tail: None,
            n_samples,
            seed,
            method: XrMethod::Recursive,
        }
    }

    pub fn tail_cutoff(&self) -> usize {
        self.tail.unwrap_or_else(|| default_tail(self.r))
    }
}

/// Smallest `K` with `r^{2(K+1)}/(1−r²) <` [`TAIL_TARGET`].
pub fn default_tail(r: f64) -> usize {
    (0..10_000)
        .find(|&k| omitted_variance(r, k) < TAIL_TARGET)
        .unwrap_or(10_000)
}

/// `r^{2(K+1)}/(1−r²)`, the variance dropped by cutting the series after `k = K`.
pub fn omitted_variance(r: f64, tail: usize) -> f64 {
    r.powi(2 * (tail as i32 + 1)) / (1.0 - r * r)
}

/// `α(k) = r^k q^{-k/2}/(1−r²)`, the covariance sequence of the untruncated construction.
pub fn xr_alpha(q: usize, r: f64, n_max: usize) -> HpdSequence {
    let values: Vec<f64> = (0..=n_max)
        .map(|k| r.powi(k as i32) * (q as f64).powf(-(k as f64) / 2.0) / (1.0 - r * r))
        .collect();
    HpdSequence::from_real(q, &values).expect("arity validated by caller")
}

/// Exact covariance of the simulated (truncated) process between two vertices.
pub fn xr_covariance(cfg: &SimulationConfig, a: &Vertex, b: &Vertex) -> f64 {
    match relation(a, b) {
        Relation::Incomparable => 0.0,
        Relation::Comparable { distance, .. } => {
            let deeper = a.len().max(b.len());
            let terms = cfg.depth + cfg.tail_cutoff() - deeper;
            let r2 = cfg.r * cfg.r;
            let series: f64 = (0..=terms).map(|j| r2.powi(j as i32)).sum();
            cfg.r.powi(distance as i32) * (cfg.q as f64).powf(-(distance as f64) / 2.0) * series
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
    pub rng: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<SimulationConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_cutoff: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omitted_variance: Option<f64>,
    /// Number of eigenvalues clipped to zero by the factorization.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clipped_eigenvalues: Option<usize>,
}

/// Monte-Carlo samples, one row per sample and one column per labeled variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub labels: Vec<String>,
    pub n_samples: usize,
    /// Row-major real parts, `n_samples × labels.len()`.
    pub values: Vec<f64>,
    /// Row-major imaginary parts for complex processes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<f64>>,
    pub provenance: Provenance,
}

impl SampleBatch {
    fn from_rows(labels: Vec<String>, rows: Vec<Vec<Complex64>>, complex: bool, provenance: Provenance) -> Self {
        let n_samples = rows.len();
        let values = rows.iter().flat_map(|r| r.iter().map(|z| z.re)).collect();
        let imag = complex.then(|| rows.iter().flat_map(|r| r.iter().map(|z| z.im)).collect());
        SampleBatch {
            labels,
            n_samples,
            values,
            imag,
            provenance,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn is_complex(&self) -> bool {
        self.imag.is_some()
    }

    pub fn get(&self, sample: usize, var: usize) -> Complex64 {
        let k = sample * self.n_vars() + var;
        Complex64::new(self.values[k], self.imag.as_ref().map_or(0.0, |im| im[k]))
    }

    pub fn column(&self, var: usize) -> Vec<Complex64> {
        (0..self.n_samples).map(|s| self.get(s, var)).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Header of labels (`re(x),im(x)` pairs for complex batches), then one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = if self.is_complex() {
            self.labels
                .iter()
                .flat_map(|l| [format!("re({l})"), format!("im({l})")])
                .collect()
        } else {
            self.labels.clone()
        };
        out.push_str(&header.join(","));
        out.push('\n');
        for s in 0..self.n_samples {
            for v in 0..self.n_vars() {
                if v > 0 {
                    out.push(',');
                }
                let z = self.get(s, v);
                if self.is_complex() {
                    let _ = write!(out, "{},{}", z.re, z.im);
                } else {
                    let _ = write!(out, "{}", z.re);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Samples of the averaging construction `X_σ = Σ_k r^k q^{-k/2} Σ_{|τ|=k} G_{στ}` on all `|σ| ≤ D`.
pub fn simulate_xr(cfg: &SimulationConfig) -> Result<SampleBatch> {
    if !(cfg.r > 0.0 && cfg.r < 1.0) {
        return Err(Error::InvalidArgument(format!("r = {} must lie in (0, 1)", cfg.r)));
    }
    let trunc = TreeTruncation::new(cfg.q, cfg.depth)?;
    let tail = cfg.tail_cutoff();
    let rows = match cfg.method {
        XrMethod::Recursive => xr_recursive(cfg, &trunc, tail),
        XrMethod::Explicit => xr_explicit(cfg, &trunc, tail)?,
    };
    let provenance = Provenance {
        generator: "simulate_xr".into(),
        seed: cfg.seed,
        rng: RNG_SCHEDULE.into(),
        config: Some(*cfg),
        tail_cutoff: Some(tail),
        omitted_variance: Some(omitted_variance(cfg.r, tail)),
        clipped_eigenvalues: None,
    };
    Ok(SampleBatch::from_rows(trunc.labels(), rows, false, provenance))
}

fn xr_recursive(cfg: &SimulationConfig, trunc: &TreeTruncation, tail: usize) -> Vec<Vec<Complex64>> {
    let q = cfg.q;
    let m = trunc.len();
    let leaf_start = trunc.level_range(cfg.depth).start;
    let r2 = cfg.r * cfg.r;
    let leaf_sd = ((0..=tail).map(|k| r2.powi(k as i32)).sum::<f64>()).sqrt();
    let step = cfg.r / (q as f64).sqrt();
    (0..cfg.n_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(cfg.seed, s);
            let mut x: Vec<f64> = (0..m)
                .map(|i| {
                    if i < leaf_start {
                        normal(&mut rng)
                    } else {
                        leaf_sd * normal(&mut rng)
                    }
                })
                .collect();
            // Breadth-first order puts the children of index i at q·i+1 ..= q·i+q.
            for i in (0..leaf_start).rev() {
                let children: f64 = (1..=q).map(|c| x[q * i + c]).sum();
                x[i] += step * children;
            }
            x.into_iter().map(|v| Complex64::new(v, 0.0)).collect()
        })
        .collect()
}

fn xr_explicit(cfg: &SimulationConfig, trunc: &TreeTruncation, tail: usize) -> Result<Vec<Vec<Complex64>>> {
    let full = TreeTruncation::with_cap(cfg.q, cfg.depth + tail, DEFAULT_VERTEX_CAP)?;
    let m = trunc.len();
    let step = cfg.r / (cfg.q as f64).sqrt();
    Ok((0..cfg.n_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(cfg.seed, s);
            let mut x = vec![0.0; m];
            for v in full.vertices() {
                let g = normal(&mut rng);
                let digits = v.digits();
                for level in 0..=digits.len().min(cfg.depth) {
                    let ancestor = Vertex::new(digits[..level].to_vec()).expect("digits of a valid vertex");
                    let idx = trunc.index_of(&ancestor).expect("ancestor lies in the truncation");
                    x[idx] += step.powi((digits.len() - level) as i32) * g;
                }
            }
            x.into_iter().map(|v| Complex64::new(v, 0.0)).collect()
        })
        .collect())
}

/// Centered Gaussian samples with covariance `A` (`E[Z Z*] = A`).
///
/// Real `A` gives real samples `L g`; complex `A` gives circular samples
/// `L(g₁ + i g₂)/√2`. `L = U Λ^{1/2}` from the eigen-decomposition, with
/// eigenvalues in `[threshold, 0)` clipped to zero.
pub fn sample_from_kernel(a: &HermitianMatrix, n_samples: usize, seed: u64) -> Result<SampleBatch> {
    let report = psd_check(a, PSD_TOL);
    if !report.psd {
        return Err(Error::NotPsd {
            min_eigenvalue: report.min_eigenvalue,
        });
    }
    let (lambda, u) = a.eigen();
    let clipped = lambda.iter().filter(|&&l| l < 0.0).count();
    let n = a.size();
    let factor = DMatrix::from_fn(n, n, |i, j| u[(i, j)] * lambda[j].max(0.0).sqrt());
    let complex = !a.is_real();
    let real_factor = factor.map(|z| z.re);
    let rows = (0..n_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(seed, s);
            if complex {
                let g: Vec<Complex64> = (0..n)
                    .map(|_| {
                        let re = normal(&mut rng);
                        Complex64::new(re, normal(&mut rng)) * std::f64::consts::FRAC_1_SQRT_2
                    })
                    .collect();
                (0..n).map(|i| (0..n).map(|j| factor[(i, j)] * g[j]).sum()).collect()
            } else {
                let g: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
                (0..n)
                    .map(|i| Complex64::new((0..n).map(|j| real_factor[(i, j)] * g[j]).sum(), 0.0))
                    .collect()
            }
        })
        .collect();
    let provenance = Provenance {
        generator: "sample_from_kernel".into(),
        seed,
        rng: RNG_SCHEDULE.into(),
        config: None,
        tail_cutoff: None,
        omitted_variance: None,
        clipped_eigenvalues: Some(clipped),
    };
    Ok(SampleBatch::from_rows(a.labels().to_vec(), rows, complex, provenance))
}

/// Per-sample spatial averages `Θ_n = q^{-n/2} Σ_{|σ|=n} X_σ` for `n = 0..=D`.
pub fn theta_average(batch: &SampleBatch, trunc: &TreeTruncation) -> Result<SampleBatch> {
    let cols: Vec<usize> = trunc
        .labels()
        .iter()
        .map(|l| batch.index_of(l).ok_or_else(|| Error::MissingLabel(l.clone())))
        .collect::<Result<_>>()?;
    let q = trunc.arity() as f64;
    let rows = (0..batch.n_samples)
        .map(|s| {
            (0..=trunc.depth())
                .map(|n| {
                    let sum: Complex64 = trunc.level_range(n).map(|i| batch.get(s, cols[i])).sum();
                    sum * q.powf(-(n as f64) / 2.0)
                })
                .collect()
        })
        .collect();
    let labels = (0..=trunc.depth()).map(|n| format!("Theta{n}")).collect();
    let mut provenance = batch.provenance.clone();
    provenance.generator = format!("theta_average({})", provenance.generator);
    Ok(SampleBatch::from_rows(labels, rows, batch.is_complex(), provenance))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovEstimate {
    pub i: usize,
    pub j: usize,
    pub mean_i: f64,
    pub mean_j: f64,
    /// Real part of the unbiased sample covariance `E[(X_i − x̄_i) conj(X_j − x̄_j)]`.
    pub cov: f64,
    pub cov_im: f64,
    /// `2.576 · sd(product) / √n`.
    pub half_width: f64,
}

/// Unbiased covariance estimates with 99% CLT half-widths, summed in sample order.
pub fn empirical_cov(batch: &SampleBatch, pairs: &[(usize, usize)]) -> Result<Vec<CovEstimate>> {
    let n = batch.n_samples;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n}")));
    }
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= batch.n_vars() || j >= batch.n_vars()) {
        return Err(Error::InvalidArgument(format!("pair ({i}, {j}) out of range")));
    }
    let nf = n as f64;
    Ok(pairs
        .par_iter()
        .map(|&(i, j)| {
            let xi = batch.column(i);
            let xj = batch.column(j);
            let mi = xi.iter().sum::<Complex64>() / nf;
            let mj = xj.iter().sum::<Complex64>() / nf;
            let products: Vec<Complex64> = xi.iter().zip(&xj).map(|(a, b)| (a - mi) * (b - mj).conj()).collect();
            let cov = products.iter().sum::<Complex64>() / (nf - 1.0);
            let mean_p = products.iter().map(|p| p.re).sum::<f64>() / nf;
            let var_p = products.iter().map(|p| (p.re - mean_p).powi(2)).sum::<f64>() / (nf - 1.0);
            CovEstimate {
                i,
                j,
                mean_i: mi.re,
                mean_j: mj.re,
                cov: cov.re,
                cov_im: cov.im,
                half_width: Z99 * var_p.sqrt() / nf.sqrt(),
            }
        })
        .collect())
}

/// Summary row `{pair, estimate, ci99, theory, pass}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovCheck {
    pub pair: [String; 2],
    pub estimate: f64,
    pub ci99: [f64; 2],
    pub theory: f64,
    pub pass: bool,
}

impl CovCheck {
    pub fn new(batch: &SampleBatch, est: &CovEstimate, theory: f64) -> Self {
        let ci99 = [est.cov - est.half_width, est.cov + est.half_width];
        CovCheck {
            pair: [batch.labels[est.i].clone(), batch.labels[est.j].clone()],
            estimate: est.cov,
            ci99,
            theory,
            pass: ci99[0] <= theory && theory <= ci99[1],
        }
    }
}
