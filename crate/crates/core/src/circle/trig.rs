use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SpectralMeasure;

/// A trigonometric polynomial `Σ a_n e^{inθ}` with finite support.
///
/// Exact zero coefficients are never stored, so `is_zero` and equality are
/// structural.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::monomial(0, c)
    }

    /// `c·e^{inθ}`.
    pub fn monomial(n: i64, c: impl Into<Complex64>) -> Self {
        Self::from_coeffs([(n, c.into())])
    }

    /// Sums repeated indices.
    pub fn from_coeffs(iter: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (n, c) in iter {
            *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        TrigPoly { coeffs }
    }

    pub fn from_real(iter: impl IntoIterator<Item = (i64, f64)>) -> Self {
        Self::from_coeffs(iter.into_iter().map(|(n, c)| (n, Complex64::new(c, 0.0))))
    }

    /// Real cosine series `c_0 + Σ_{k≥1} c_k cos(kθ)`.
    pub fn cosine_series(c: &[f64]) -> Self {
        let mut terms = Vec::new();
        for (k, &ck) in c.iter().enumerate() {
            if k == 0 {
                terms.push((0, ck));
            } else {
                terms.push((k as i64, ck / 2.0));
                terms.push((-(k as i64), ck / 2.0));
            }
        }
        Self::from_real(terms)
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// True if every coefficient has index `n ≥ 0`.
    pub fn is_analytic(&self) -> bool {
        self.min_index().is_none_or(|n| n >= 0)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.iter()
            .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * theta))
            .sum()
    }

    /// Values on the uniform grid `θ_j = 2πj/G`.
    pub fn eval_grid(&self, grid: usize) -> Vec<Complex64> {
        (0..grid).map(|j| self.eval(grid_angle(j, grid))).collect()
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self::from_coeffs(self.iter().map(|(n, c)| (n, c * s)))
    }

    pub fn add(&self, other: &TrigPoly) -> Self {
        Self::from_coeffs(self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &TrigPoly) -> Self {
        Self::from_coeffs(self.iter().chain(other.iter().map(|(n, c)| (n, -c))))
    }

    /// Pointwise product, i.e. convolution of coefficient sequences.
    pub fn mul(&self, other: &TrigPoly) -> Self {
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, a) in self.iter() {
            for (m, b) in other.iter() {
                *out.entry(n + m).or_default() += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    /// The function `θ ↦ conj(f(θ))`, with coefficients `conj(a_{-n})`.
    pub fn conj(&self) -> Self {
        Self::from_coeffs(self.iter().map(|(n, c)| (-n, c.conj())))
    }

    /// Multiplies coefficient `n` by `r^{|n|}` (Poisson smoothing).
    pub fn poisson_smooth(&self, r: f64) -> Self {
        Self::from_coeffs(self.iter().map(|(n, c)| (n, c * r.powi(n.unsigned_abs() as i32))))
    }

    /// Keeps coefficients with `lo ≤ n ≤ hi`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        TrigPoly {
            coeffs: self.coeffs.range(lo..=hi).map(|(&n, &c)| (n, c)).collect(),
        }
    }

    /// Riesz projections `(R₊f, R₋f)`: `R₊` keeps `n ≥ 0`, `R₋` keeps `n ≤ 0`.
    /// Both keep the constant term, so `R₊ + R₋ = Id + P₀`.
    pub fn riesz(&self) -> (TrigPoly, TrigPoly) {
        (self.restrict(0, i64::MAX), self.restrict(i64::MIN, 0))
    }

    pub fn riesz_plus(&self) -> TrigPoly {
        self.restrict(0, i64::MAX)
    }

    pub fn riesz_minus(&self) -> TrigPoly {
        self.restrict(i64::MIN, 0)
    }

    /// The dilation average `E_N`, acting on coefficients by
    /// `(E_N f)^(n) = f̂(nN)`.
    pub fn e_n_average(&self, n: usize) -> TrigPoly {
        assert!(n >= 1, "E_N needs N >= 1");
        let n = n as i64;
        Self::from_coeffs(
            self.iter()
                .filter(|(k, _)| k.rem_euclid(n) == 0)
                .map(|(k, c)| (k / n, c)),
        )
    }

    /// Sobolev norm `(Σ (1+n²)^s |f̂(n)|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.iter()
            .map(|(n, c)| (1.0 + (n * n) as f64).powf(s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Wiener norm `Σ |f̂(n)|`.
    pub fn wiener_norm(&self) -> f64 {
        self.iter().map(|(_, c)| c.norm()).sum()
    }

    /// `max |f|` over a uniform grid of `grid` points.
    pub fn sup_norm(&self, grid: usize) -> f64 {
        self.eval_grid(grid).into_iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(∫ |f|² dμ)^{1/2}`, via `Σ_{j,k} a_j conj(a_k) μ̂(k−j)`.
    pub fn l2_norm(&self, mu: &SpectralMeasure) -> f64 {
        let terms: Vec<(i64, Complex64)> = self.iter().collect();
        let mut total = Complex64::new(0.0, 0.0);
        for &(j, aj) in &terms {
            for &(k, ak) in &terms {
                total += aj * ak.conj() * mu.fourier(k - j);
            }
        }
        total.re.max(0.0).sqrt()
    }

    pub fn norms(&self, sobolev: &[f64], measures: &[&SpectralMeasure], grid: usize) -> Norms {
        Norms {
            sobolev: sobolev.iter().map(|&s| (s, self.sobolev_norm(s))).collect(),
            wiener: self.wiener_norm(),
            sup: self.sup_norm(grid),
            l2: measures.iter().map(|mu| self.l2_norm(mu)).collect(),
        }
    }
}

/// Norm bundle returned by [`TrigPoly::norms`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Norms {
    pub sobolev: Vec<(f64, f64)>,
    pub wiener: f64,
    pub sup: f64,
    pub l2: Vec<f64>,
}

pub(crate) fn grid_angle(j: usize, grid: usize) -> f64 {
    2.0 * PI * j as f64 / grid as f64
}

#[derive(Serialize, Deserialize)]
struct TrigPolyJson {
    coeffs: Vec<(i64, f64, f64)>,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TrigPolyJson {
            coeffs: self.iter().map(|(n, c)| (n, c.re, c.im)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = TrigPolyJson::deserialize(d)?;
        Ok(TrigPoly::from_coeffs(
            raw.coeffs.into_iter().map(|(n, re, im)| (n, Complex64::new(re, im))),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn riesz_examples() {
        let f = TrigPoly::from_real([(-1, 1.0), (0, 3.0), (1, 1.0)]);
        let (plus, minus) = f.riesz();
        assert_eq!(plus, TrigPoly::from_real([(0, 3.0), (1, 1.0)]));
        assert_eq!(minus, TrigPoly::from_real([(-1, 1.0), (0, 3.0)]));
        assert!(TrigPoly::monomial(1, 1.0).riesz_minus().is_zero());
        let five = TrigPoly::constant(5.0);
        assert_eq!(five.riesz(), (five.clone(), five.clone()));
    }

    #[test]
    fn riesz_reconstruction() {
        let f = TrigPoly::from_coeffs([
            (-3, Complex64::new(1.0, 2.0)),
            (0, c(-4.0)),
            (2, Complex64::new(0.5, -1.0)),
        ]);
        let (p, m) = f.riesz();
        assert_eq!(p.add(&m).sub(&TrigPoly::constant(f.coeff(0))), f);
    }

    #[test]
    fn e_n_examples() {
        assert_eq!(TrigPoly::monomial(2, 1.0).e_n_average(2), TrigPoly::monomial(1, 1.0));
        assert!(TrigPoly::monomial(1, 1.0).e_n_average(2).is_zero());
        assert_eq!(TrigPoly::constant(7.0).e_n_average(5), TrigPoly::constant(7.0));
        assert_eq!(TrigPoly::monomial(-4, 1.0).e_n_average(2), TrigPoly::monomial(-2, 1.0));
    }

    #[test]
    fn e_n_matches_pointwise_average() {
        let f = TrigPoly::from_coeffs([(-4, c(1.0)), (-1, c(0.3)), (3, Complex64::new(0.0, 2.0)), (6, c(-1.5))]);
        let n = 3;
        let g = f.e_n_average(n);
        for &theta in &[0.0, 0.4, 2.0, 5.5] {
            let avg: Complex64 = (0..n)
                .map(|k| f.eval((theta + 2.0 * PI * k as f64) / n as f64))
                .sum::<Complex64>()
                / n as f64;
            assert!((avg - g.eval(theta)).norm() < 1e-12);
        }
    }

    #[test]
    fn norm_examples() {
        let e1 = TrigPoly::monomial(1, 1.0);
        assert!((e1.sobolev_norm(0.5) - 2f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(TrigPoly::from_real([(0, 1.0), (1, 1.0)]).wiener_norm(), 2.0);
        assert!((e1.l2_norm(&SpectralMeasure::lebesgue()) - 1.0).abs() < 1e-15);
        assert!((TrigPoly::from_real([(0, 1.0), (1, 1.0)]).sup_norm(64) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l2_against_atom() {
        let f = TrigPoly::from_real([(1, 1.0), (2, 1.0)]);
        let mu = SpectralMeasure::atom(0.0, 2.0);
        assert!((f.l2_norm(&mu) - (2.0f64 * 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let f = TrigPoly::from_coeffs([(-1, Complex64::new(1.0, -2.0)), (3, c(0.5))]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"coeffs":[[-1,1.0,-2.0],[3,0.5,0.0]]}"#);
        let back: TrigPoly = serde_json::from_str(r#"{"coeffs":[[-1,1,-2],[3,0.5,0]]}"#).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<TrigPoly>(r#"{"coeffs":[[0.5,1,0]]}"#).is_err());
    }
}
