use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::trig::{grid_angle, TrigPoly};
use crate::error::{Error, Result};

/// Tolerance below which a trig-poly density is still accepted as non-negative.
pub const DENSITY_TOL: f64 = 1e-9;

/// Grid used to verify trig-poly densities are real and non-negative.
pub const VERIFY_GRID: usize = 4096;

/// Poisson kernel normalized so that `∫ P_r dm = 1`, i.e. `P̂_r(n) = r^{|n|}`.
pub fn poisson_kernel(r: f64, theta: f64) -> f64 {
    (1.0 - r * r) / (1.0 - 2.0 * r * theta.cos() + r * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub theta: f64,
    pub mass: f64,
}

/// Non-negative density on a uniform grid `θ_j = 2πj/G`.
#[derive(Debug, Clone)]
pub struct GridDensity {
    values: Vec<f64>,
    dft: Arc<OnceLock<Vec<Complex64>>>,
}

impl GridDensity {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidMeasure("grid density needs at least one sample".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "grid density sample {v} is negative or not finite"
            )));
        }
        Ok(GridDensity {
            values,
            dft: Arc::new(OnceLock::new()),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation on the periodic grid.
    pub fn eval(&self, theta: f64) -> f64 {
        let g = self.values.len();
        let x = theta.rem_euclid(TAU) / TAU * g as f64;
        let j = (x.floor() as usize).min(g - 1);
        let t = x - j as f64;
        self.values[j] * (1.0 - t) + self.values[(j + 1) % g] * t
    }

    /// Rectangle-rule coefficient `(1/G) Σ_j w_j e^{-inθ_j}`; aliased for `|n| > G/2`.
    pub fn fourier(&self, n: i64) -> Complex64 {
        let dft = self.dft.get_or_init(|| {
            let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let fft = FftPlanner::new().plan_fft_forward(buf.len());
            fft.process(&mut buf);
            let g = buf.len() as f64;
            buf.iter().map(|z| z / g).collect()
        });
        let g = dft.len() as i64;
        dft[n.rem_euclid(g) as usize]
    }
}

impl PartialEq for GridDensity {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

/// Absolutely continuous part of a [`SpectralMeasure`].
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    /// Real trigonometric polynomial (Hermitian coefficients).
    Trig(TrigPoly),
    /// Samples on a uniform grid.
    Grid(GridDensity),
    /// `P_r ∗ base`, kept symbolic so coefficients stay exact.
    Poisson { r: f64, base: Box<SpectralMeasure> },
}

impl Density {
    pub fn fourier(&self, n: i64) -> Complex64 {
        match self {
            Density::Trig(p) => p.coeff(n),
            Density::Grid(g) => g.fourier(n),
            Density::Poisson { r, base } => base.fourier(n) * r.powi(n.unsigned_abs() as i32),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_smoothed(1.0, theta)
    }

    /// `(P_s ∗ density)(θ)`; `s = 1` means no smoothing.
    fn eval_smoothed(&self, s: f64, theta: f64) -> f64 {
        match self {
            Density::Trig(p) => {
                if s == 1.0 {
                    p.eval(theta).re
                } else {
                    p.iter()
                        .map(|(n, c)| (c * Complex64::from_polar(s.powi(n.unsigned_abs() as i32), n as f64 * theta)).re)
                        .sum()
                }
            }
            Density::Grid(g) => {
                if s == 1.0 {
                    g.eval(theta)
                } else {
                    let len = g.values.len();
                    g.values
                        .iter()
                        .enumerate()
                        .map(|(j, w)| w * poisson_kernel(s, theta - grid_angle(j, len)))
                        .sum::<f64>()
                        / len as f64
                }
            }
            Density::Poisson { r, base } => base.smoothed_value(r * s, theta),
        }
    }
}

/// A positive measure on the circle: finitely many atoms plus an optional
/// absolutely continuous part, with Fourier coefficients
/// `μ̂(n) = ∫ e^{-inθ} dμ(θ)` against normalized Haar measure `dm`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralMeasure {
    atoms: Vec<Atom>,
    density: Option<Density>,
}

impl SpectralMeasure {
    pub fn new(atoms: Vec<Atom>, density: Option<Density>) -> Result<Self> {
        let mut checked = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !a.mass.is_finite() || a.mass < 0.0 || !a.theta.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom at θ = {} has invalid mass {}",
                    a.theta, a.mass
                )));
            }
            if a.mass > 0.0 {
                checked.push(Atom {
                    theta: a.theta.rem_euclid(TAU),
                    mass: a.mass,
                });
            }
        }
        if let Some(Density::Trig(p)) = &density {
            validate_trig_density(p)?;
        }
        if let Some(Density::Poisson { r, .. }) = &density {
            if !(0.0..1.0).contains(r) {
                return Err(Error::InvalidMeasure(format!("Poisson radius {r} outside [0, 1)")));
            }
        }
        Ok(SpectralMeasure {
            atoms: checked,
            density,
        })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Normalized Haar measure `m`.
    pub fn lebesgue() -> Self {
        Self::trig_density(TrigPoly::constant(1.0)).expect("constant density is valid")
    }

    pub fn atom(theta: f64, mass: f64) -> Self {
        Self::new(vec![Atom { theta, mass }], None).expect("atom must have non-negative mass")
    }

    pub fn atoms(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms, None)
    }

    pub fn trig_density(p: TrigPoly) -> Result<Self> {
        Self::new(Vec::new(), Some(Density::Trig(p)))
    }

    pub fn grid_density(values: Vec<f64>) -> Result<Self> {
        Self::new(Vec::new(), Some(Density::Grid(GridDensity::new(values)?)))
    }

    /// Adds an atom of the given mass at `theta`.
    pub fn with_atom(mut self, theta: f64, mass: f64) -> Result<Self> {
        let mut atoms = std::mem::take(&mut self.atoms);
        atoms.push(Atom { theta, mass });
        Self::new(atoms, self.density)
    }

    pub fn atom_list(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    /// The absolutely continuous part alone.
    pub fn ac_part(&self) -> SpectralMeasure {
        SpectralMeasure {
            atoms: Vec::new(),
            density: self.density.clone(),
        }
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn fourier(&self, n: i64) -> Complex64 {
        if n < 0 {
            return self.fourier(-n).conj();
        }
        let atoms: Complex64 = self
            .atoms
            .iter()
            .map(|a| Complex64::from_polar(a.mass, -(n as f64) * a.theta))
            .sum();
        atoms + self.density.as_ref().map_or(Complex64::default(), |d| d.fourier(n))
    }

    /// `μ(𝕋) = μ̂(0)`.
    pub fn total_mass(&self) -> f64 {
        self.fourier(0).re
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().fold(0.0, |s, a| s + a.mass)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                theta: a.theta,
                mass: a.mass * factor,
            })
            .collect();
        let density = match &self.density {
            None => None,
            Some(Density::Trig(p)) => Some(Density::Trig(p.scale(factor))),
            Some(Density::Grid(g)) => Some(Density::Grid(GridDensity::new(
                g.values.iter().map(|v| v * factor).collect(),
            )?)),
            Some(Density::Poisson { r, base }) => Some(Density::Poisson {
                r: *r,
                base: Box::new(base.scaled(factor)?),
            }),
        };
        Self::new(atoms, density)
    }

    /// Rescales to unit total mass; the zero measure is rejected.
    pub fn normalized(&self) -> Result<Self> {
        let mass = self.total_mass();
        if mass <= 0.0 {
            return Err(Error::InvalidMeasure("cannot normalize a measure of zero mass".into()));
        }
        self.scaled(1.0 / mass)
    }

    /// Density of the absolutely continuous part at `θ` (0 if there is none).
    pub fn density_at(&self, theta: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.eval(theta))
    }

    /// Absolutely continuous density sampled on the uniform grid of `grid` points.
    pub fn density_on_grid(&self, grid: usize) -> Vec<f64> {
        match &self.density {
            None => vec![0.0; grid],
            Some(Density::Grid(g)) if g.values.len() == grid => g.values.clone(),
            Some(d) => (0..grid).into_par_iter().map(|j| d.eval(grid_angle(j, grid))).collect(),
        }
    }

    /// `(P_s ∗ μ)(θ)` for `0 ≤ s < 1`.
    pub(crate) fn smoothed_value(&self, s: f64, theta: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|a| a.mass * poisson_kernel(s, theta - a.theta))
            .sum();
        atoms + self.density.as_ref().map_or(0.0, |d| d.eval_smoothed(s, theta))
    }

    /// `P_r ∗ μ`, a purely absolutely continuous measure with
    /// coefficients `r^{|n|} μ̂(n)`. Nested smoothings collapse (`P_s ∗ P_r = P_{rs}`).
    pub fn poisson_convolve(&self, r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidArgument(format!(
                "Poisson radius r = {r} must lie in [0, 1)"
            )));
        }
        if let (true, Some(Density::Poisson { r: inner, base })) = (self.atoms.is_empty(), &self.density) {
            return Ok(SpectralMeasure {
                atoms: Vec::new(),
                density: Some(Density::Poisson {
                    r: r * inner,
                    base: base.clone(),
                }),
            });
        }
        Ok(SpectralMeasure {
            atoms: Vec::new(),
            density: Some(Density::Poisson {
                r,
                base: Box::new(self.clone()),
            }),
        })
    }
}

fn validate_trig_density(p: &TrigPoly) -> Result<()> {
    let scale = p.wiener_norm().max(1.0);
    for (n, c) in p.iter() {
        if (p.coeff(-n) - c.conj()).norm() > 1e-12 * scale {
            return Err(Error::InvalidMeasure(format!(
                "trig density is not real: coefficient {n} is not the conjugate of coefficient {}",
                -n
            )));
        }
    }
    let min = p
        .eval_grid(VERIFY_GRID)
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    if min < -DENSITY_TOL * scale {
        return Err(Error::InvalidMeasure(format!(
            "trig density takes the negative value {min:e}"
        )));
    }
    Ok(())
}

/// Measure JSON layout: `{"atoms":[{"theta":..,"mass":..}], "density":{...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityJson {
    Trig { coeffs: Vec<(i64, f64, f64)> },
    Grid { values: Vec<f64> },
    Poisson { r: f64, base: Box<MeasureJson> },
}

impl TryFrom<MeasureJson> for SpectralMeasure {
    type Error = Error;

    fn try_from(json: MeasureJson) -> Result<Self> {
        let density = json.density.map(Density::try_from).transpose()?;
        SpectralMeasure::new(json.atoms, density)
    }
}

impl TryFrom<DensityJson> for Density {
    type Error = Error;

    fn try_from(json: DensityJson) -> Result<Self> {
        Ok(match json {
            DensityJson::Trig { coeffs } => Density::Trig(TrigPoly::from_coeffs(
                coeffs.into_iter().map(|(n, re, im)| (n, Complex64::new(re, im))),
            )),
            DensityJson::Grid { values } => Density::Grid(GridDensity::new(values)?),
            DensityJson::Poisson { r, base } => Density::Poisson {
                r,
                base: Box::new(SpectralMeasure::try_from(*base)?),
            },
        })
    }
}

impl From<&SpectralMeasure> for MeasureJson {
    fn from(mu: &SpectralMeasure) -> Self {
        MeasureJson {
            atoms: mu.atoms.clone(),
            density: mu.density.as_ref().map(|d| match d {
                Density::Trig(p) => DensityJson::Trig {
                    coeffs: p.iter().map(|(n, c)| (n, c.re, c.im)).collect(),
                },
                Density::Grid(g) => DensityJson::Grid {
                    values: g.values.clone(),
                },
                Density::Poisson { r, base } => DensityJson::Poisson {
                    r: *r,
                    base: Box::new(MeasureJson::from(base.as_ref())),
                },
            }),
        }
    }
}

impl Serialize for SpectralMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = MeasureJson::deserialize(d)?;
        SpectralMeasure::try_from(json).map_err(serde::de::Error::custom)
    }
}

/// Two-level density `a` on `[0, π)` and `b` on `[π, 2π)`, sampled on `grid` points.
pub fn two_level_density(a: f64, b: f64, grid: usize) -> Result<SpectralMeasure> {
    if !grid.is_multiple_of(2) {
        return Err(Error::InvalidArgument("two-level densities need an even grid".into()));
    }
    let values = (0..grid)
        .map(|j| if grid_angle(j, grid) < PI { a } else { b })
        .collect();
    SpectralMeasure::grid_density(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn fourier_examples() {
        let m = SpectralMeasure::lebesgue();
        assert_eq!(m.fourier(0), Complex64::new(1.0, 0.0));
        assert_eq!(m.fourier(3), Complex64::default());
        let d = SpectralMeasure::atom(0.0, 1.0);
        for n in -5..5 {
            assert!(close(d.fourier(n), Complex64::new(1.0, 0.0), 1e-15));
        }
        let mu = SpectralMeasure::trig_density(TrigPoly::cosine_series(&[2.0, 2.0])).unwrap();
        assert!(close(mu.fourier(1), Complex64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn hermitian_symmetry_is_exact() {
        let mu = SpectralMeasure::new(
            vec![Atom { theta: 1.3, mass: 0.4 }, Atom { theta: 5.0, mass: 1.1 }],
            Some(Density::Trig(TrigPoly::cosine_series(&[1.0, 0.5]))),
        )
        .unwrap();
        for n in 0..20 {
            assert_eq!(mu.fourier(-n), mu.fourier(n).conj());
            assert!(mu.fourier(n).norm() <= mu.total_mass() + 1e-12);
        }
    }

    #[test]
    fn poisson_examples() {
        let m = SpectralMeasure::lebesgue().poisson_convolve(0.6).unwrap();
        for &t in &[0.0, 1.0, 3.0] {
            assert!((m.density_at(t) - 1.0).abs() < 1e-14);
        }
        let r = 0.5f64.sqrt();
        let p = SpectralMeasure::atom(0.0, 1.0).poisson_convolve(r).unwrap();
        let expected = (1.0 - 0.5) / (1.0 - r).powi(2);
        assert!((p.density_at(0.0) - expected).abs() < 1e-12);
        assert!((expected - 5.828427).abs() < 1e-6);
        for n in -6..6 {
            assert!(close(p.fourier(n), Complex64::new(r.powi(n.abs() as i32), 0.0), 1e-14));
        }
        assert!(SpectralMeasure::lebesgue().poisson_convolve(1.0).is_err());
    }

    #[test]
    fn poisson_semigroup_collapses() {
        let mu = SpectralMeasure::atom(0.7, 2.0);
        let twice = mu.poisson_convolve(0.5).unwrap().poisson_convolve(0.4).unwrap();
        match twice.density() {
            Some(Density::Poisson { r, .. }) => assert!((r - 0.2).abs() < 1e-15),
            _ => panic!("expected a Poisson density"),
        }
        let once = mu.poisson_convolve(0.2).unwrap();
        for &t in &[0.0, 0.7, 2.0] {
            assert!((twice.density_at(t) - once.density_at(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_of_grid_density_is_quadrature() {
        let g = SpectralMeasure::grid_density(vec![1.0; 64]).unwrap();
        let p = g.poisson_convolve(0.5).unwrap();
        assert!((p.density_at(0.3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_fourier_and_interpolation() {
        let grid = 256;
        let values: Vec<f64> = (0..grid).map(|j| 2.0 + 2.0 * grid_angle(j, grid).cos()).collect();
        let mu = SpectralMeasure::grid_density(values).unwrap();
        assert!(close(mu.fourier(0), Complex64::new(2.0, 0.0), 1e-12));
        assert!(close(mu.fourier(1), Complex64::new(1.0, 0.0), 1e-12));
        assert!(close(mu.fourier(-1), Complex64::new(1.0, 0.0), 1e-12));
        assert!(close(mu.fourier(2), Complex64::default(), 1e-12));
        assert!((mu.density_at(grid_angle(3, grid)) - (2.0 + 2.0 * grid_angle(3, grid).cos())).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_measures() {
        assert!(SpectralMeasure::trig_density(TrigPoly::cosine_series(&[1.0, 3.0])).is_err());
        assert!(SpectralMeasure::trig_density(TrigPoly::monomial(1, 1.0)).is_err());
        assert!(SpectralMeasure::atoms(vec![Atom { theta: 0.0, mass: -1.0 }]).is_err());
        assert!(SpectralMeasure::grid_density(vec![1.0, -0.5]).is_err());
        assert!(SpectralMeasure::zero().normalized().is_err());
    }

    #[test]
    fn json_round_trip() {
        let mu: SpectralMeasure = serde_json::from_str(
            r#"{"atoms":[{"theta":3.14159,"mass":0.5}],"density":{"kind":"trig","coeffs":[[0,1,0]]}}"#,
        )
        .unwrap();
        assert!((mu.total_mass() - 1.5).abs() < 1e-15);
        let nested = mu.poisson_convolve(0.3).unwrap().with_atom(1.0, 0.25).unwrap();
        let text = serde_json::to_string(&nested).unwrap();
        let back: SpectralMeasure = serde_json::from_str(&text).unwrap();
        for n in -64..=64 {
            assert!(close(back.fourier(n), nested.fourier(n), 1e-12));
        }
    }
}
