//! Random inputs shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use hpd::circle::{Atom, Density, SpectralMeasure, TrigPoly};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Real trig polynomial `c₀ + Σ (z_k e^{ikθ} + conj(z_k) e^{−ikθ})` with `c₀ ≥ 2Σ|z_k| + floor`.
pub fn nonneg_trig(rng: &mut ChaCha8Rng, degree: usize, floor: f64) -> TrigPoly {
    let z: Vec<Complex64> = (1..=degree)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let c0 = 2.0 * z.iter().map(|c| c.norm()).sum::<f64>() + floor;
    let mut coeffs = vec![(0i64, Complex64::new(c0, 0.0))];
    for (k, c) in z.iter().enumerate() {
        coeffs.push((k as i64 + 1, *c));
        coeffs.push((-(k as i64) - 1, c.conj()));
    }
    TrigPoly::from_coeffs(coeffs)
}

pub fn random_atoms(rng: &mut ChaCha8Rng, max: usize) -> Vec<Atom> {
    let k = rng.random_range(0..=max);
    (0..k)
        .map(|_| Atom {
            theta: rng.random_range(0.0..2.0 * PI),
            mass: rng.random_range(0.05..1.0),
        })
        .collect()
}

/// Atoms plus a non-negative trig density; never the zero measure.
pub fn random_measure(rng: &mut ChaCha8Rng) -> SpectralMeasure {
    let atoms = random_atoms(rng, 3);
    let with_density = atoms.is_empty() || rng.random_bool(0.7);
    let density = with_density.then(|| {
        let degree = rng.random_range(0..=4);
        let floor = rng.random_range(0.0..0.5);
        Density::Trig(nonneg_trig(rng, degree, floor).scale(rng.random_range(0.2..1.5)))
    });
    SpectralMeasure::new(atoms, density).expect("valid measure")
}

/// Like [`random_measure`], sometimes with a sampled grid density or a Poisson-smoothed atom.
pub fn random_mixed_measure(rng: &mut ChaCha8Rng) -> SpectralMeasure {
    match rng.random_range(0..6) {
        0 => {
            let p = nonneg_trig(rng, 3, 0.1);
            let bump = rng.random_range(0.0..2.0 * PI);
            let values = (0..256)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / 256.0;
                    p.eval(t).re + (-(4.0 * (t - bump).cos() - 4.0).abs()).exp()
                })
                .collect();
            SpectralMeasure::grid_density(values).expect("positive grid")
        }
        1 => SpectralMeasure::new(
            random_atoms(rng, 2),
            Some(Density::Poisson {
                r: rng.random_range(0.1..0.9),
                base: Box::new(SpectralMeasure::atom(rng.random_range(0.0..2.0 * PI), 1.0)),
            }),
        )
        .expect("valid measure"),
        _ => random_measure(rng),
    }
}

/// Analytic polynomial with vanishing constant term, degree in `1..=max_degree`.
pub fn random_h20(rng: &mut ChaCha8Rng, max_degree: usize) -> TrigPoly {
    let degree = rng.random_range(1..=max_degree);
    TrigPoly::from_coeffs((1..=degree as i64).map(|n| {
        (
            n,
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        )
    }))
}

/// Analytic polynomial of degree `< n`, never identically zero.
pub fn random_analytic_below(rng: &mut ChaCha8Rng, n: usize) -> TrigPoly {
    let mut coeffs: Vec<(i64, Complex64)> = (0..n as i64)
        .map(|k| {
            (
                k,
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    coeffs[0].1 += Complex64::new(2.0, 0.0);
    TrigPoly::from_coeffs(coeffs)
}
