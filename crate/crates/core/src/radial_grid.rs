//! Radial momentum grid for the s-wave sector of L²(ℝ³).
//!
//! The source couples only to rotation-invariant modes, so the one-particle
//! space is the half-line k > 0 with measure 4πk² dk. A quadrature rule
//! (k_i, w_i) turns it into ℂ^m with orthonormal modes e_i; a radial
//! function f̂(k) is represented by the coefficients f̂(k_i)·√(4π k_i² w_i).

use std::f64::consts::PI;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// (2π)^{-3/2}, the Fourier normalization of the point source.
pub const SOURCE_AMPLITUDE: f64 = 0.063_493_635_934_240_97;

/// Quadrature scheme used to place radial nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// Single Gauss–Legendre rule on [0, lambda_max].
    #[default]
    GaussLegendre,
    /// `panels` equal-width panels, each carrying a Gauss–Legendre rule.
    /// The node count must be divisible by `panels`.
    CompositeGaussLegendre { panels: usize },
}

impl std::str::FromStr for QuadratureScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "gauss_legendre" || s == "gauss-legendre" || s == "gl" {
            return Ok(QuadratureScheme::GaussLegendre);
        }
        if let Some(rest) = s
            .strip_prefix("composite_gauss_legendre:")
            .or_else(|| s.strip_prefix("composite-gauss-legendre:"))
        {
            let panels = rest
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad panel count in scheme '{s}'")))?;
            return Ok(QuadratureScheme::CompositeGaussLegendre { panels });
        }
        Err(Error::InvalidArgument(format!("unknown quadrature scheme '{s}'")))
    }
}

/// Radial quadrature nodes and weights on (0, lambda_max).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    lambda_max: f64,
    scheme: QuadratureScheme,
}

impl RadialGrid {
    pub fn new(lambda_max: f64, m: usize, scheme: QuadratureScheme) -> Result<Self> {
        build_radial_grid(lambda_max, m, scheme)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// √(4π k_i² w_i): the factor mapping a radial Fourier amplitude at node i
    /// to the coefficient of the orthonormal mode e_i.
    pub fn mode_factor(&self, i: usize) -> f64 {
        let k = self.nodes[i];
        (4.0 * PI * k * k * self.weights[i]).sqrt()
    }

    /// Discretizes a radial Fourier amplitude f̂(|k|).
    pub fn discretize<F: Fn(f64) -> Complex64>(&self, amplitude: F) -> OneParticleVector {
        OneParticleVector::new(
            (0..self.len())
                .map(|i| amplitude(self.nodes[i]) * self.mode_factor(i))
                .collect(),
        )
    }

    /// Σ w_i f(k_i).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&k, &w)| w * f(k)).sum()
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        // Tricomi's initial guess, then Newton on P_m.
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(m, z);
                dp = d;
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = weight;
        w[m - 1 - i] = weight;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

pub fn build_radial_grid(lambda_max: f64, m: usize, scheme: QuadratureScheme) -> Result<RadialGrid> {
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda_max must be positive and finite, got {lambda_max}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("node count must be at least 1".into()));
    }
    let panels = match scheme {
        QuadratureScheme::GaussLegendre => 1,
        QuadratureScheme::CompositeGaussLegendre { panels } => {
            if panels == 0 || !m.is_multiple_of(panels) {
                return Err(Error::InvalidArgument(format!(
                    "node count {m} is not divisible by panel count {panels}"
                )));
            }
            panels
        }
    };
    let per_panel = m / panels;
    let (x, w) = gauss_legendre(per_panel);
    let width = lambda_max / panels as f64;
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for p in 0..panels {
        let a = p as f64 * width;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(a + 0.5 * width * (xi + 1.0));
            weights.push(0.5 * width * wi);
        }
    }
    Ok(RadialGrid {
        nodes,
        weights,
        lambda_max,
        scheme,
    })
}

/// Diagonal one-particle energies h_i = k_i² + e0.
pub fn one_particle_energies(grid: &RadialGrid, e0: f64) -> Vec<f64> {
    grid.nodes().iter().map(|k| k * k + e0).collect()
}

/// Sharp-cutoff coupling vector g·χ_Λ with χ̂_Λ(k) = (2π)^{-3/2}·1_{k ≤ Λ}.
pub fn coupling_vector(grid: &RadialGrid, lambda_cut: f64, g: f64) -> Result<OneParticleVector> {
    if !(lambda_cut > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cutoff must be positive, got {lambda_cut}"
        )));
    }
    if lambda_cut > grid.lambda_max() {
        return Err(Error::CutoffExceedsGrid {
            cutoff: lambda_cut,
            lambda_max: grid.lambda_max(),
        });
    }
    Ok(grid.discretize(|k| {
        if k <= lambda_cut {
            Complex64::new(g * SOURCE_AMPLITUDE, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// How [`cutoff_energy_shift`] evaluates E_Λ.
#[derive(Debug, Clone, Copy)]
pub enum EnergyShift<'a> {
    ClosedForm,
    Quadrature(&'a RadialGrid),
}

/// E_Λ = −g²⟨χ_Λ, h⁻¹χ_Λ⟩.
///
/// The closed form is −(g²/2π²)(Λ − √e0·arctan(Λ/√e0)). The quadrature mode
/// sums −|χ_i|²/(k_i² + e0) over the grid nodes below Λ, which is the exact
/// ground energy of the discretized cutoff Hamiltonian.
pub fn cutoff_energy_shift(g: f64, e0: f64, lambda_cut: f64, mode: EnergyShift<'_>) -> Result<f64> {
    if !(e0 > 0.0) {
        return Err(Error::UnsupportedParameter(format!(
            "energy offset e0 must be positive, got {e0}"
        )));
    }
    if lambda_cut <= 0.0 {
        return Ok(0.0);
    }
    match mode {
        EnergyShift::ClosedForm => {
            let s = e0.sqrt();
            Ok(-(g * g) / (2.0 * PI * PI) * (lambda_cut - s * (lambda_cut / s).atan()))
        }
        EnergyShift::Quadrature(grid) => {
            let chi = coupling_vector(grid, lambda_cut, g)?;
            Ok(-chi
                .iter()
                .zip(grid.nodes())
                .map(|(c, k)| c.norm_sqr() / (k * k + e0))
                .sum::<f64>())
        }
    }
}

/// ‖g f_{√e0}‖² restricted to momenta above `lambda_max`:
/// (g²/2π²)∫_{Λ}^∞ k²/(k²+e0)² dk.
pub fn dressing_norm_tail(g: f64, e0: f64, lambda_max: f64) -> f64 {
    let a = e0.sqrt();
    let below = (lambda_max / a).atan() / (2.0 * a) - lambda_max / (2.0 * (lambda_max * lambda_max + e0));
    g * g / (2.0 * PI * PI) * (PI / (4.0 * a) - below)
}

/// Vector in the discretized one-particle space ℂ^m.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OneParticleVector(Vec<Complex64>);

impl OneParticleVector {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        OneParticleVector(coeffs)
    }

    pub fn zeros(m: usize) -> Self {
        OneParticleVector(vec![Complex64::new(0.0, 0.0); m])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        OneParticleVector(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Unit vector e_i.
    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = Self::zeros(m);
        v.0[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// ⟨self, other⟩, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.len(), other.len(), "mode count mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Applies a diagonal operator.
    pub fn scale_diagonal(&self, diag: &[f64]) -> Self {
        assert_eq!(self.len(), diag.len(), "mode count mismatch");
        OneParticleVector(self.0.iter().zip(diag).map(|(c, d)| c * d).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Index<usize> for OneParticleVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for &OneParticleVector {
    type Output = OneParticleVector;

    fn add(self, rhs: &OneParticleVector) -> OneParticleVector {
        assert_eq!(self.len(), rhs.len(), "mode count mismatch");
        OneParticleVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &OneParticleVector {
    type Output = OneParticleVector;

    fn sub(self, rhs: &OneParticleVector) -> OneParticleVector {
        assert_eq!(self.len(), rhs.len(), "mode count mismatch");
        OneParticleVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &OneParticleVector {
    type Output = OneParticleVector;

    fn neg(self) -> OneParticleVector {
        OneParticleVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<Complex64> for &OneParticleVector {
    type Output = OneParticleVector;

    fn mul(self, rhs: Complex64) -> OneParticleVector {
        OneParticleVector(self.0.iter().map(|a| a * rhs).collect())
    }
}

impl From<Vec<Complex64>> for OneParticleVector {
    fn from(v: Vec<Complex64>) -> Self {
        OneParticleVector(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn source_amplitude_constant() {
        assert_relative_eq!(SOURCE_AMPLITUDE, (2.0 * PI).powf(-1.5), max_relative = 1e-15);
    }

    #[test]
    fn reproduces_k_squared_moment() {
        for m in 2..12 {
            let grid = build_radial_grid(1.0, m, QuadratureScheme::GaussLegendre).unwrap();
            assert_relative_eq!(grid.integrate(|k| k * k), 1.0 / 3.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn nodes_inside_and_weights_positive() {
        let grid = build_radial_grid(40.0, 64, QuadratureScheme::GaussLegendre).unwrap();
        assert!(grid.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(grid.nodes().iter().all(|&k| k > 0.0 && k < 40.0));
        assert!(grid.weights().iter().all(|&w| w > 0.0));
        assert_relative_eq!(grid.weights().iter().sum::<f64>(), 40.0, max_relative = 1e-13);
    }

    #[test]
    fn one_node_is_midpoint_rule() {
        let grid = build_radial_grid(3.0, 1, QuadratureScheme::GaussLegendre).unwrap();
        assert_eq!(grid.nodes(), &[1.5]);
        assert_eq!(grid.weights(), &[3.0]);
    }

    #[test]
    fn composite_grid_is_exact_on_cubics() {
        let scheme = QuadratureScheme::CompositeGaussLegendre { panels: 4 };
        let grid = build_radial_grid(2.0, 8, scheme).unwrap();
        assert_relative_eq!(grid.integrate(|k| k * k * k), 4.0, max_relative = 1e-13);
        assert!(build_radial_grid(2.0, 9, scheme).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            build_radial_grid(0.0, 4, QuadratureScheme::GaussLegendre),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_radial_grid(1.0, 0, QuadratureScheme::GaussLegendre),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn energies() {
        let grid = build_radial_grid(40.0, 64, QuadratureScheme::GaussLegendre).unwrap();
        let h = one_particle_energies(&grid, 1.0);
        assert!(h.windows(2).all(|w| w[0] < w[1]));
        assert!(h[0] > 1.0);
        let free = one_particle_energies(&grid, 0.0);
        for (e, k) in free.iter().zip(grid.nodes()) {
            assert_eq!(*e, k * k);
        }
    }

    #[test]
    fn coupling_vector_cases() {
        let grid = build_radial_grid(40.0, 64, QuadratureScheme::GaussLegendre).unwrap();
        assert_eq!(coupling_vector(&grid, 10.0, 0.0).unwrap().norm_sqr(), 0.0);
        let below_first = 0.5 * grid.nodes()[0];
        assert_eq!(coupling_vector(&grid, below_first, 1.0).unwrap().norm_sqr(), 0.0);
        assert!(matches!(
            coupling_vector(&grid, 41.0, 1.0),
            Err(Error::CutoffExceedsGrid { .. })
        ));
        // Full-range cutoff integrates a polynomial exactly.
        let chi = coupling_vector(&grid, 40.0, 2.0).unwrap();
        assert_relative_eq!(
            chi.norm_sqr() * 6.0 * PI * PI / 4.0,
            40.0_f64.powi(3),
            max_relative = 1e-12
        );
    }

    #[test]
    fn energy_shift_edge_cases() {
        assert_eq!(cutoff_energy_shift(0.0, 1.0, 10.0, EnergyShift::ClosedForm).unwrap(), 0.0);
        assert!(cutoff_energy_shift(1.0, 1.0, 1e-12, EnergyShift::ClosedForm).unwrap().abs() < 1e-30);
        assert!(matches!(
            cutoff_energy_shift(1.0, 0.0, 10.0, EnergyShift::ClosedForm),
            Err(Error::UnsupportedParameter(_))
        ));
        let mut prev = 0.0;
        for lam in [1.0, 5.0, 10.0, 20.0, 40.0] {
            let e = cutoff_energy_shift(1.0, 1.0, lam, EnergyShift::ClosedForm).unwrap();
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn dressing_tail_limits() {
        // Λ → 0 gives the full norm 1/(8π√e0).
        assert_relative_eq!(dressing_norm_tail(1.0, 4.0, 1e-12), 1.0 / (16.0 * PI), max_relative = 1e-10);
        assert!(dressing_norm_tail(1.0, 1.0, 1e6) < 1e-7);
    }

    #[test]
    fn vector_algebra() {
        let a = OneParticleVector::new(vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)]);
        let b = OneParticleVector::from_real(&[3.0, 4.0]);
        assert_eq!(a.inner(&b), Complex64::new(3.0, -6.0) + Complex64::new(0.0, 4.0));
        assert_eq!(a.inner(&b), b.inner(&a).conj());
        assert_eq!(a.norm_sqr(), 6.0);
        assert_eq!((&(&a + &b) - &b), a);
    }
}
