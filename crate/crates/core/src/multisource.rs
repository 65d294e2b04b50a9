//! N-source interior-boundary conditions: the Green matrix G^λ, the parameter
//! matrix S(λ), the dressing function φ(λ) defined by X_k(φ) = 1, the ground
//! energy C(φ) = Σ_i Y_i(φ(e0)), and point-interaction eigenvalues from the
//! zeros of det S(λ).
//!
//! Root finding uses two exact facts. The phases factor out,
//! det S(λ) = e^{iΣθ_i}·det S(λ)|_{θ=0}, and after dividing each row with
//! β_i ≠ 0 by β_i (rows with β_i = 0 are diagonal) what remains is the real
//! symmetric matrix
//!
//!   M(s) = diag(a_i + s/4π) + G^{s²},   s = √λ,
//!
//! whose derivative (I + [e^{−s|ξ_i−ξ_j|}]_{i≠j})/4π is positive definite.
//! Every eigenvalue of M is therefore strictly increasing in s, crosses zero at
//! most once, and each crossing is bracketed by an inertia count.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::yukawa::{
    apply_minus_laplacian_star, eval_x, eval_y, inner_product, IbcParams, Point3, SourceSet, YukawaFunction,
    YukawaTerm,
};

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Absolute threshold on ‖S c − 1‖ per √N.
pub const RANGE_TOL: f64 = 1e-10;
/// Audit tolerance for X_k(φ) = 1.
pub const X_AUDIT_TOL: f64 = 1e-10;
/// |Im Σ Y_i(φ)| above this is an internal-consistency failure.
pub const IMAG_FAIL_TOL: f64 = 1e-8;

/// Source positions, one parameter tuple per source, and the energy offset.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    sources: SourceSet,
    params: Vec<IbcParams>,
    e0: f64,
}

impl SourceConfig {
    pub fn new(positions: Vec<Point3>, params: Vec<IbcParams>, e0: f64) -> Result<Self> {
        let sources = SourceSet::new(positions)?;
        if params.len() != sources.len() {
            return Err(Error::InvalidConfig(format!(
                "{} parameter tuples for {} sources",
                params.len(),
                sources.len()
            )));
        }
        for p in &params {
            p.validate()?;
        }
        if !(e0 > 0.0 && e0.is_finite()) {
            return Err(Error::InvalidConfig(format!("e0 must be positive, got {e0}")));
        }
        Ok(SourceConfig { sources, params, e0 })
    }

    pub fn sources(&self) -> &SourceSet {
        &self.sources
    }

    pub fn params(&self) -> &[IbcParams] {
        &self.params
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }
}

fn require_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// −e^{−sd}/(4πd).
fn green(s: f64, d: f64) -> f64 {
    -(-s * d).exp() / (4.0 * PI * d)
}

/// G_ij = −e^{−√λ d_ij}/(4π d_ij) off the diagonal; the diagonal is zero.
pub fn gram_matrix(cfg: &SourceConfig, lambda: f64) -> Result<DMatrix<f64>> {
    require_lambda(lambda)?;
    Ok(green_matrix(cfg, lambda.sqrt()))
}

fn green_matrix(cfg: &SourceConfig, s: f64) -> DMatrix<f64> {
    let n = cfg.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = green(s, cfg.sources.distance(i, j));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// S_ij = δ_ij e^{iθ_i}(α_i + √λβ_i/4π) + (1 − δ_ij) e^{iθ_i} β_i G_ij.
pub fn s_matrix(cfg: &SourceConfig, lambda: f64) -> Result<DMatrix<Complex64>> {
    let g = gram_matrix(cfg, lambda)?;
    let s = lambda.sqrt();
    let n = cfg.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let p = &cfg.params[i];
        let phase = Complex64::from_polar(1.0, p.theta);
        if i == j {
            phase * (p.alpha + s * p.beta / (4.0 * PI))
        } else {
            phase * p.beta * g[(i, j)]
        }
    }))
}

/// φ(λ) = Σ_l c_l f_{√λ}(· − ξ_l) with S(λ)c = (1, …, 1)ᵀ.
#[derive(Debug, Clone, PartialEq)]
pub struct Dressing {
    pub lambda: f64,
    pub coeffs: Vec<Complex64>,
    pub phi: YukawaFunction,
    /// ‖S c − 1‖.
    pub residual: f64,
}

pub fn solve_phi(cfg: &SourceConfig, lambda: f64) -> Result<Dressing> {
    let s = s_matrix(cfg, lambda)?;
    let n = cfg.len();
    let ones = DVector::from_element(n, Complex64::new(1.0, 0.0));

    // Least squares through the SVD, dropping directions the matrix cannot
    // resolve; for a well-conditioned S this is the ordinary solve.
    let svd = s.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = 1e-13 * sigma_max.max(f64::MIN_POSITIVE);
    let c = svd
        .solve(&ones, eps)
        .map_err(|e| Error::InternalConsistency(format!("SVD solve failed: {e}")))?;
    let residual = (&s * &c - &ones).norm();
    if !(residual <= RANGE_TOL * (n as f64).sqrt()) {
        return Err(Error::NotInRange { residual });
    }

    let decay = Complex64::new(lambda.sqrt(), 0.0);
    let terms = c
        .iter()
        .enumerate()
        .map(|(l, &cl)| YukawaTerm::new(l, cl, decay))
        .collect::<Result<Vec<_>>>()?;
    let phi = YukawaFunction::from_terms(terms)?;

    for k in 0..n {
        let x = eval_x(&cfg.sources, &phi, k, &cfg.params[k])?;
        let scale = 1.0 + (0..n).map(|l| (s[(k, l)] * c[l]).norm()).sum::<f64>();
        if (x - 1.0).norm() > X_AUDIT_TOL * scale {
            return Err(Error::InternalConsistency(format!(
                "X_{k}(phi) = {x} after solving S c = 1"
            )));
        }
    }
    Ok(Dressing {
        lambda,
        coeffs: c.iter().copied().collect(),
        phi,
        residual,
    })
}

/// Σ_i Y_i(f).
pub fn sum_y(cfg: &SourceConfig, f: &YukawaFunction) -> Result<Complex64> {
    let mut acc = C0;
    for (i, p) in cfg.params.iter().enumerate() {
        acc += eval_y(&cfg.sources, f, i, p)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundEnergy {
    /// Re Σ_i Y_i(φ(e0)).
    pub energy: f64,
    pub im_part: f64,
    pub dressing: Dressing,
}

/// C(φ(e0)) together with its imaginary part and the dressing function.
pub fn ground_energy_report(cfg: &SourceConfig) -> Result<GroundEnergy> {
    let dressing = solve_phi(cfg, cfg.e0)?;
    let c = sum_y(cfg, &dressing.phi)?;
    if c.im.abs() > IMAG_FAIL_TOL {
        return Err(Error::InternalConsistency(format!(
            "sum of Y_i(phi) has imaginary part {:e}",
            c.im
        )));
    }
    Ok(GroundEnergy {
        energy: c.re,
        im_part: c.im,
        dressing,
    })
}

/// C(φ(e0)) = Re Σ_i Y_i(φ(e0)).
pub fn ground_energy_multisource(cfg: &SourceConfig) -> Result<f64> {
    Ok(ground_energy_report(cfg)?.energy)
}

/// Indices with β_i ≠ 0 and their inverse scattering lengths a_i = α_i/β_i.
fn finite_lengths(cfg: &SourceConfig) -> (Vec<usize>, Vec<f64>) {
    cfg.params
        .iter()
        .enumerate()
        .filter(|(_, p)| p.beta != 0.0)
        .map(|(i, p)| (i, p.alpha / p.beta))
        .unzip()
}

/// Ascending eigenvalues of M(s) on the sources with finite a_i.
fn m_eigenvalues(cfg: &SourceConfig, idx: &[usize], a: &[f64], s: f64) -> Vec<f64> {
    let n = idx.len();
    let m = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            a[r] + s / (4.0 * PI)
        } else {
            green(s, cfg.sources.distance(idx[r], idx[c]))
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Every root of det S lies at s = √λ ≤ max_i(−4πa_i + Σ_{j≠i} 1/d_ij) (Gershgorin on M).
fn root_upper_bound(cfg: &SourceConfig, idx: &[usize], a: &[f64]) -> f64 {
    idx.iter()
        .zip(a)
        .map(|(&i, &ai)| {
            let off: f64 = idx
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| 1.0 / cfg.sources.distance(i, j))
                .sum();
            -4.0 * PI * ai + off
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointEigenvalue {
    /// Zero of det S(λ).
    pub lambda: f64,
    /// Eigenvalue e0 − λ of the one-particle operator h̃.
    pub energy: f64,
}

/// Roots s of the k-th eigenvalue of M in [s_lo, s_hi] with M(s_lo) having
/// more negative eigenvalues than M(s_hi).
fn crossings(cfg: &SourceConfig, idx: &[usize], a: &[f64], s_lo: f64, s_hi: f64) -> Vec<f64> {
    let lo = m_eigenvalues(cfg, idx, a, s_lo);
    let hi = m_eigenvalues(cfg, idx, a, s_hi);
    let neg_lo = lo.iter().filter(|&&e| e < 0.0).count();
    let neg_hi = hi.iter().filter(|&&e| e < 0.0).count();
    (neg_hi..neg_lo)
        .map(|k| {
            let (mut l, mut h) = (s_lo, s_hi);
            for _ in 0..200 {
                let mid = 0.5 * (l + h);
                if mid <= l || mid >= h {
                    break;
                }
                if m_eigenvalues(cfg, idx, a, mid)[k] < 0.0 {
                    l = mid;
                } else {
                    h = mid;
                }
            }
            0.5 * (l + h)
        })
        .collect()
}

/// Zeros λ of det S(λ) in `search_interval`, paired with energies e0 − λ and
/// returned by ascending energy. A root on the interval boundary is an error
/// asking for a wider interval.
pub fn point_interaction_eigenvalues(
    cfg: &SourceConfig,
    search_interval: (f64, f64),
) -> Result<Vec<PointEigenvalue>> {
    let (lo, hi) = search_interval;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "search interval ({lo}, {hi}) must satisfy 0 < lo < hi < inf"
        )));
    }
    let (idx, a) = finite_lengths(cfg);
    if idx.is_empty() {
        return Ok(Vec::new());
    }
    let (s_lo, s_hi) = (lo.sqrt(), hi.sqrt());
    let upper = root_upper_bound(cfg, &idx, &a);
    if upper < s_lo {
        return Ok(Vec::new());
    }
    let boundary_tol = 1e-13;
    let scale = 1.0 + s_hi / (4.0 * PI) + a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for (s, lambda) in [(s_lo, lo), (s_hi, hi)] {
        if s <= upper + 1.0
            && m_eigenvalues(cfg, &idx, &a, s)
                .iter()
                .any(|e| e.abs() <= boundary_tol * scale)
        {
            return Err(Error::WidenInterval { lambda });
        }
    }
    let top = s_hi.min(upper.max(s_lo) * (1.0 + 1e-12) + 1e-12);
    let mut roots: Vec<PointEigenvalue> = crossings(cfg, &idx, &a, s_lo, top)
        .into_iter()
        .map(|s| {
            let lambda = s * s;
            PointEigenvalue {
                lambda,
                energy: cfg.e0 - lambda,
            }
        })
        .collect();
    roots.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    Ok(roots)
}

/// det S(λ), for diagnostics.
pub fn det_s(cfg: &SourceConfig, lambda: f64) -> Result<Complex64> {
    Ok(s_matrix(cfg, lambda)?.determinant())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedBelowReport {
    /// Largest zero of det S(λ) over λ > 0, if any.
    pub lambda_max: Option<f64>,
    /// Lower edge of the spectrum of h̃: min(e0, e0 − λ_max).
    pub h_tilde_bottom: f64,
    pub strictly_positive: bool,
    /// `Some(true)` when strict positivity guarantees a lower bound; `None`
    /// when the criterion does not decide.
    pub bounded_below: Option<bool>,
    /// For a single source: the inverse scattering length a₁ and the
    /// threshold −√e0/(4π) it must exceed.
    pub single_source_a: Option<f64>,
    pub single_source_threshold: Option<f64>,
}

/// Strict positivity of h̃ from the largest point-interaction root.
pub fn check_bounded_below(cfg: &SourceConfig) -> BoundedBelowReport {
    let (idx, a) = finite_lengths(cfg);
    let lambda_max = if idx.is_empty() {
        None
    } else {
        let upper = root_upper_bound(cfg, &idx, &a);
        if upper <= 0.0 {
            None
        } else {
            let roots = crossings(cfg, &idx, &a, 0.0, upper * (1.0 + 1e-12) + 1e-12);
            roots.into_iter().map(|s| s * s).fold(None, |m: Option<f64>, l| {
                Some(m.map_or(l, |m| m.max(l)))
            })
        }
    };
    let bottom = match lambda_max {
        Some(l) => (cfg.e0 - l).min(cfg.e0),
        None => cfg.e0,
    };
    let strictly_positive = bottom > 1e-12 * cfg.e0.max(1.0);
    let (single_source_a, single_source_threshold) = if cfg.len() == 1 {
        (
            Some(cfg.params[0].inverse_scattering_length()),
            Some(-cfg.e0.sqrt() / (4.0 * PI)),
        )
    } else {
        (None, None)
    };
    BoundedBelowReport {
        lambda_max,
        h_tilde_bottom: bottom,
        strictly_positive,
        bounded_below: strictly_positive.then_some(true),
        single_source_a,
        single_source_threshold,
    }
}

/// An element of ker X inside span{f_{√λ₁}(·−ξ_l), f_{√λ₂}(·−ξ_l)}: the
/// coefficients d₂ on the second decay are free, d₁ = −S(λ₁)⁻¹S(λ₂)d₂.
pub fn sample_ker_x(
    cfg: &SourceConfig,
    lambdas: (f64, f64),
    free: &[Complex64],
) -> Result<YukawaFunction> {
    let n = cfg.len();
    if free.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} free coefficients for {n} sources",
            free.len()
        )));
    }
    let (l1, l2) = lambdas;
    if l1 == l2 {
        return Err(Error::InvalidArgument("auxiliary decays must differ".into()));
    }
    let s1 = s_matrix(cfg, l1)?;
    let s2 = s_matrix(cfg, l2)?;
    let d2 = DVector::from_column_slice(free);
    let rhs = -(&s2 * &d2);
    let d1 = s1
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Precondition(format!("S({l1}) is singular")))?;
    let mut terms = Vec::with_capacity(2 * n);
    for l in 0..n {
        terms.push(YukawaTerm::new(l, d1[l], Complex64::new(l1.sqrt(), 0.0))?);
        terms.push(YukawaTerm::new(l, d2[l], Complex64::new(l2.sqrt(), 0.0))?);
    }
    YukawaFunction::from_terms(terms)
}

/// Σ_i Y_i(ψ) − [⟨Tφ, ψ⟩ − ⟨φ, Tψ⟩] for ψ ∈ ker X, φ = φ(e0), T = −Δ* + e0.
///
/// With X(φ) = 1 and X(ψ) = 0 the boundary form collapses to Σ_i Y_i(ψ),
/// and the Green identity gives it as ⟨φ, Δ*ψ⟩ − ⟨Δ*φ, ψ⟩.
pub fn kernel_identity_defect(cfg: &SourceConfig, psi: &YukawaFunction) -> Result<Complex64> {
    let phi = solve_phi(cfg, cfg.e0)?.phi;
    let src = &cfg.sources;
    let t_phi = apply_minus_laplacian_star(&phi, cfg.e0);
    let t_psi = apply_minus_laplacian_star(psi, cfg.e0);
    let form = inner_product(src, &t_phi, psi)? - inner_product(src, &phi, &t_psi)?;
    Ok(sum_y(cfg, psi)? - form)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(a: f64, e0: f64) -> SourceConfig {
        SourceConfig::new(vec![[0.0; 3]], vec![IbcParams::scattering_length(0.0, a)], e0).unwrap()
    }

    #[test]
    fn gram_examples() {
        let cfg = SourceConfig::new(
            vec![[0.0; 3], [1.0, 0.0, 0.0]],
            vec![IbcParams::identity(); 2],
            1.0,
        )
        .unwrap();
        let g = gram_matrix(&cfg, 1.0).unwrap();
        assert!((g[(0, 1)] + (-1.0f64).exp() / (4.0 * PI)).abs() < 1e-16);
        assert_eq!(g[(0, 1)], g[(1, 0)]);
        assert_eq!(g[(0, 0)], 0.0);
        let s = s_matrix(&cfg, 1.0).unwrap();
        assert_eq!(s[(0, 1)], C0);
        assert!(gram_matrix(&cfg, 0.0).is_err());
    }

    #[test]
    fn coincident_sources_rejected() {
        let r = SourceConfig::new(vec![[1.0; 3], [1.0; 3]], vec![IbcParams::identity(); 2], 1.0);
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn single_source_specialization() {
        for (g, e0) in [(1.0, 1.0), (0.3, 2.5), (-2.0, 0.1)] {
            let cfg = SourceConfig::new(vec![[0.0; 3]], vec![IbcParams::coupling(g).unwrap()], e0).unwrap();
            let r = ground_energy_report(&cfg).unwrap();
            let want = g * g * e0.sqrt() / (4.0 * PI);
            assert!((r.energy - want).abs() <= 1e-14 * want.abs().max(1.0));
            assert!((r.dressing.coeffs[0] - g).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_scalar_is_not_in_range() {
        // a = −√λ/(4π) makes S(λ) = 0 for λ = 1
        let cfg = one(-1.0 / (4.0 * PI), 1.0);
        assert!(matches!(solve_phi(&cfg, 1.0), Err(Error::NotInRange { .. })));
    }

    #[test]
    fn single_source_root() {
        let cfg = one(-1.0 / (4.0 * PI), 3.0);
        let roots = point_interaction_eigenvalues(&cfg, (0.01, 10.0)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].lambda - 1.0).abs() < 1e-12);
        assert!((roots[0].energy - 2.0).abs() < 1e-12);
        assert!(point_interaction_eigenvalues(&one(0.5, 1.0), (0.01, 100.0)).unwrap().is_empty());
        assert!(matches!(
            point_interaction_eigenvalues(&cfg, (1.0, 4.0)),
            Err(Error::WidenInterval { .. })
        ));
    }

    #[test]
    fn bounded_below_examples() {
        let free = SourceConfig::new(
            vec![[0.0; 3], [0.0, 1.0, 0.0]],
            vec![IbcParams::identity(); 2],
            1.0,
        )
        .unwrap();
        let r = check_bounded_below(&free);
        assert!(r.strictly_positive && r.lambda_max.is_none());
        let marginal = check_bounded_below(&one(-2.0f64.sqrt() / (4.0 * PI), 2.0));
        assert!(!marginal.strictly_positive);
        assert_eq!(marginal.bounded_below, None);
        let pos = check_bounded_below(&one(0.1, 1.0));
        assert_eq!(pos.bounded_below, Some(true));
        assert!((pos.single_source_threshold.unwrap() + 1.0 / (4.0 * PI)).abs() < 1e-16);
    }
}
