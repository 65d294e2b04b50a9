//! Closed-form algebra on finite spans of shifted Yukawa functions
//!
//!   f_γ(x − ξ) = −e^{−γ|x−ξ|} / (4π|x−ξ|),   Re γ > 0,
//!
//! which carry the 1/r singularity at a source. Everything here is exact:
//! inner products, the action of the adjoint Laplacian (Δ* f_γ = γ² f_γ away
//! from the sources), the boundary functionals A_i, B_i at each source and
//! their parameterized combinations X_i, Y_i.
//!
//! Regular (H²) parts are represented by equal-center differences
//! f_{γ₁} − f_{γ₂}, which have B = 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Pairwise-distinct source positions ξ_1, …, ξ_N.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSet {
    positions: Vec<Point3>,
}

impl SourceSet {
    pub fn new(positions: Vec<Point3>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidConfig("source set is empty".into()));
        }
        for (i, p) in positions.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidConfig(format!("source {i} has a non-finite coordinate")));
            }
        }
        for i in 0..positions.len() {
            for j in 0..i {
                let d = distance(&positions[i], &positions[j]);
                if !(d > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "sources {j} and {i} coincide"
                    )));
                }
            }
        }
        Ok(SourceSet { positions })
    }

    /// A single source at the origin.
    pub fn origin() -> Self {
        SourceSet {
            positions: vec![[0.0; 3]],
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(&self.positions[i], &self.positions[j])
    }

    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in 0..i {
                best = best.min(self.distance(i, j));
            }
        }
        best
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownSource(i))
        }
    }
}

fn distance(a: &Point3, b: &Point3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// f_γ evaluated at distance r > 0 from its center.
pub fn yukawa_value(decay: Complex64, r: f64) -> Complex64 {
    -(-decay * r).exp() / (4.0 * PI * r)
}

/// One term c·f_γ(· − ξ_source).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YukawaTerm {
    pub source: usize,
    pub coeff: Complex64,
    pub decay: Complex64,
}

impl YukawaTerm {
    pub fn new(source: usize, coeff: Complex64, decay: Complex64) -> Result<Self> {
        if !(decay.re > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "decay must have positive real part, got {decay}"
            )));
        }
        Ok(YukawaTerm { source, coeff, decay })
    }
}

/// Finite linear combination of shifted Yukawa functions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct YukawaFunction {
    terms: Vec<YukawaTerm>,
}

impl YukawaFunction {
    pub fn zero() -> Self {
        YukawaFunction { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<YukawaTerm>) -> Result<Self> {
        for t in &terms {
            YukawaTerm::new(t.source, t.coeff, t.decay)?;
        }
        Ok(YukawaFunction { terms })
    }

    /// c·f_γ(· − ξ_source).
    pub fn single(source: usize, coeff: Complex64, decay: Complex64) -> Result<Self> {
        Ok(YukawaFunction {
            terms: vec![YukawaTerm::new(source, coeff, decay)?],
        })
    }

    /// c·(f_{γ₁} − f_{γ₂}) centered at one source: an H² function.
    pub fn regular_difference(
        source: usize,
        coeff: Complex64,
        decay1: Complex64,
        decay2: Complex64,
    ) -> Result<Self> {
        Ok(YukawaFunction {
            terms: vec![
                YukawaTerm::new(source, coeff, decay1)?,
                YukawaTerm::new(source, -coeff, decay2)?,
            ],
        })
    }

    pub fn terms(&self) -> &[YukawaTerm] {
        &self.terms
    }

    pub fn push(&mut self, term: YukawaTerm) -> Result<()> {
        self.terms.push(YukawaTerm::new(term.source, term.coeff, term.decay)?);
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        YukawaFunction { terms }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        YukawaFunction {
            terms: self
                .terms
                .iter()
                .map(|t| YukawaTerm {
                    coeff: t.coeff * s,
                    ..*t
                })
                .collect(),
        }
    }

    fn map_coeffs<F: Fn(&YukawaTerm) -> Complex64>(&self, f: F) -> Self {
        YukawaFunction {
            terms: self
                .terms
                .iter()
                .map(|t| YukawaTerm { coeff: f(t), ..*t })
                .collect(),
        }
    }

    fn check_sources(&self, sources: &SourceSet) -> Result<()> {
        for t in &self.terms {
            sources.check(t.source)?;
        }
        Ok(())
    }
}

/// (e^z − 1)/z, accurate near z = 0.
fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 2..40 {
            term *= z / n as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// ⟨f_{γ₁}(·−ξ₁), f_{γ₂}(·−ξ₂)⟩ for centers a distance `d` apart.
///
/// With a = γ̄₁, b = γ₂ the Fourier representation splits by partial
/// fractions into (e^{−ad} − e^{−bd}) / (4πd(b² − a²)). The form
/// e^{−ad}·exprel(−(b−a)d) / (4π(a+b)) is used near b = a and d = 0, where it
/// reduces to e^{−ad}/(8πa) and 1/(4π(a+b)) respectively.
pub fn basis_inner(decay1: Complex64, decay2: Complex64, d: f64) -> Complex64 {
    let a = decay1.conj();
    let b = decay2;
    let z = -(b - a) * d;
    let ratio = if z.norm() < 0.5 {
        (-a * d).exp() * exprel(z)
    } else {
        ((-a * d).exp() - (-b * d).exp()) / ((b - a) * d)
    };
    ratio / (4.0 * PI * (a + b))
}

/// ⟨f, g⟩ in L²(ℝ³), antilinear in `f`.
pub fn inner_product(sources: &SourceSet, f: &YukawaFunction, g: &YukawaFunction) -> Result<Complex64> {
    f.check_sources(sources)?;
    g.check_sources(sources)?;
    let mut acc = C0;
    for s in f.terms() {
        for t in g.terms() {
            let d = if s.source == t.source {
                0.0
            } else {
                sources.distance(s.source, t.source)
            };
            acc += s.coeff.conj() * t.coeff * basis_inner(s.decay, t.decay, d);
        }
    }
    Ok(acc)
}

/// Δ* acting term-wise: f_γ ↦ γ² f_γ.
pub fn apply_laplacian_star(f: &YukawaFunction) -> YukawaFunction {
    f.map_coeffs(|t| t.coeff * t.decay * t.decay)
}

/// (−Δ* + e0) acting term-wise: f_γ ↦ (e0 − γ²) f_γ.
pub fn apply_minus_laplacian_star(f: &YukawaFunction, e0: f64) -> YukawaFunction {
    f.map_coeffs(|t| t.coeff * (e0 - t.decay * t.decay))
}

/// A_i f = lim ∂_r (r f) at ξ_i.
pub fn eval_a(sources: &SourceSet, f: &YukawaFunction, i: usize) -> Result<Complex64> {
    sources.check(i)?;
    f.check_sources(sources)?;
    Ok(f.terms()
        .iter()
        .map(|t| {
            if t.source == i {
                t.coeff * t.decay / (4.0 * PI)
            } else {
                t.coeff * yukawa_value(t.decay, sources.distance(i, t.source))
            }
        })
        .sum())
}

/// B_i f = −4π lim r f at ξ_i.
pub fn eval_b(sources: &SourceSet, f: &YukawaFunction, i: usize) -> Result<Complex64> {
    sources.check(i)?;
    f.check_sources(sources)?;
    Ok(f.terms().iter().filter(|t| t.source == i).map(|t| t.coeff).sum())
}

/// Boundary-condition parameters (θ, α, β, γ, δ) of one source, αδ − βγ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbcParams {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Tolerance on |αδ − βγ − 1|, relative to the size of the products.
const DET_TOL: f64 = 1e-12;

impl IbcParams {
    pub fn new(theta: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let p = IbcParams {
            theta,
            alpha,
            beta,
            gamma,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn identity() -> Self {
        IbcParams {
            theta: 0.0,
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            delta: 1.0,
        }
    }

    /// X = B/g, Y = gA: the single-source condition Bψ⁽ⁿ⁺¹⁾ = gψ⁽ⁿ⁾.
    pub fn coupling(g: f64) -> Result<Self> {
        if g == 0.0 || !g.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "coupling parameterization needs a finite nonzero g, got {g}"
            )));
        }
        IbcParams::new(0.0, 1.0 / g, 0.0, 0.0, g)
    }

    /// Canonical parameters with inverse scattering length a = α/β:
    /// β = 1, α = a, δ = 1, γ = a − 1.
    pub fn scattering_length(theta: f64, a: f64) -> Self {
        IbcParams {
            theta,
            alpha: a,
            beta: 1.0,
            gamma: a - 1.0,
            delta: 1.0,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.alpha * self.delta - self.beta * self.gamma
    }

    /// a = α/β, +∞ when β = 0.
    pub fn inverse_scattering_length(&self) -> f64 {
        if self.beta == 0.0 {
            f64::INFINITY
        } else {
            self.alpha / self.beta
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.theta, self.alpha, self.beta, self.gamma, self.delta];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams { det: f64::NAN });
        }
        let det = self.determinant();
        let scale = 1.0_f64
            .max((self.alpha * self.delta).abs())
            .max((self.beta * self.gamma).abs());
        if (det - 1.0).abs() > DET_TOL * scale {
            return Err(Error::InvalidParams { det });
        }
        Ok(())
    }

    fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// X_i = e^{iθ}(αB_i + βA_i).
pub fn eval_x(sources: &SourceSet, f: &YukawaFunction, i: usize, p: &IbcParams) -> Result<Complex64> {
    p.validate()?;
    Ok(p.phase() * (p.alpha * eval_b(sources, f, i)? + p.beta * eval_a(sources, f, i)?))
}

/// Y_i = e^{iθ}(γB_i + δA_i).
pub fn eval_y(sources: &SourceSet, f: &YukawaFunction, i: usize, p: &IbcParams) -> Result<Complex64> {
    p.validate()?;
    Ok(p.phase() * (p.gamma * eval_b(sources, f, i)? + p.delta * eval_a(sources, f, i)?))
}

/// Which boundary form [`symmetry_defect`] subtracts.
#[derive(Debug, Clone, Copy)]
pub enum BoundaryForm<'a> {
    /// Σ_i ⟨B_iφ, A_iψ⟩ − ⟨A_iφ, B_iψ⟩.
    AB,
    /// Σ_i ⟨X_iφ, Y_iψ⟩ − ⟨Y_iφ, X_iψ⟩ with one parameter tuple per source.
    XY(&'a [IbcParams]),
}

/// [⟨φ, Δ*ψ⟩ − ⟨Δ*φ, ψ⟩] minus the boundary form; zero for every pair in the span.
pub fn symmetry_defect(
    sources: &SourceSet,
    phi: &YukawaFunction,
    psi: &YukawaFunction,
    form: BoundaryForm<'_>,
) -> Result<Complex64> {
    let lhs = inner_product(sources, phi, &apply_laplacian_star(psi))?
        - inner_product(sources, &apply_laplacian_star(phi), psi)?;
    let mut boundary = C0;
    match form {
        BoundaryForm::AB => {
            for i in 0..sources.len() {
                boundary += eval_b(sources, phi, i)?.conj() * eval_a(sources, psi, i)?
                    - eval_a(sources, phi, i)?.conj() * eval_b(sources, psi, i)?;
            }
        }
        BoundaryForm::XY(params) => {
            if params.len() != sources.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} parameter tuples for {} sources",
                    params.len(),
                    sources.len()
                )));
            }
            for (i, p) in params.iter().enumerate() {
                boundary += eval_x(sources, phi, i, p)?.conj() * eval_y(sources, psi, i, p)?
                    - eval_y(sources, phi, i, p)?.conj() * eval_x(sources, psi, i, p)?;
            }
        }
    }
    Ok(lhs - boundary)
}

/// Relative tolerance for the interior-boundary condition Bψ⁽¹⁾ = gψ⁽⁰⁾.
const IBC_TOL: f64 = 1e-12;

/// A vector (ψ⁽⁰⁾, ψ⁽¹⁾) of the two-sector space ℂ ⊕ L²(ℝ³).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSectorVector {
    pub vacuum: Complex64,
    pub one: YukawaFunction,
}

/// ⟨φ, Hψ⟩ − ⟨Hφ, ψ⟩ for the two-sector operator
/// H(ψ⁽⁰⁾, ψ⁽¹⁾) = (gAψ⁽¹⁾, (−Δ* + e0)ψ⁽¹⁾) with a single source at the origin.
/// Both arguments must satisfy Bψ⁽¹⁾ = gψ⁽⁰⁾.
pub fn two_sector_ibc_symmetry(
    phi: &TwoSectorVector,
    psi: &TwoSectorVector,
    g: f64,
    e0: f64,
) -> Result<Complex64> {
    let src = SourceSet::origin();
    for v in [phi, psi] {
        let b = eval_b(&src, &v.one, 0)?;
        let residual = b - g * v.vacuum;
        if residual.norm() > IBC_TOL * (1.0 + b.norm()) {
            return Err(Error::Precondition(format!(
                "interior-boundary condition violated: B psi1 - g psi0 = {residual}"
            )));
        }
    }
    let h_phi1 = apply_minus_laplacian_star(&phi.one, e0);
    let h_psi1 = apply_minus_laplacian_star(&psi.one, e0);
    let top = phi.vacuum.conj() * g * eval_a(&src, &psi.one, 0)?
        - (g * eval_a(&src, &phi.one, 0)?).conj() * psi.vacuum;
    let bottom = inner_product(&src, &phi.one, &h_psi1)? - inner_product(&src, &h_phi1, &psi.one)?;
    Ok(top + bottom)
}
