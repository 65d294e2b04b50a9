//! Lowest eigenpairs of Hermitian [`SparseOperator`]s.
//!
//! [`lanczos_lowest`] is a thick-restart Lanczos iteration with full
//! reorthogonalization: each new Krylov vector is orthogonalized against every
//! stored one (classical Gram–Schmidt, repeated when cancellation is severe),
//! and when the basis is full it is compressed onto the lowest Ritz vectors.
//! Real operators run in real arithmetic. Convergence is decided
//! on true residual norms ‖Hx − θx‖. [`dense_lowest`] diagonalizes the full
//! matrix and serves as the reference for small problems.

use nalgebra::{ComplexField, DMatrix, DMatrixView, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::SparseOperator;

/// A second Gram–Schmidt pass runs when the first leaves less than this
/// fraction of the norm (the DGKS criterion).
const REORTH_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Ritz values are recomputed every this many steps, and at every restart.
const CHECK_EVERY: usize = 4;

/// Largest dimension accepted by [`dense_lowest`].
pub const DENSE_LIMIT: usize = 2000;

/// Relative hermiticity defect above which an operator is rejected.
const HERMITIAN_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct EigResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit-norm eigenvectors, one per eigenvalue.
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// ‖Hx − λx‖ per pair.
    pub residuals: Vec<f64>,
    /// Matrix-vector products used (0 for the dense solver).
    pub iterations: usize,
    pub converged: bool,
}

impl EigResult {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn gap(&self) -> Option<f64> {
        (self.eigenvalues.len() > 1).then(|| self.eigenvalues[1] - self.eigenvalues[0])
    }
}

/// max |H_ij − conj(H_ji)|.
pub fn hermiticity_audit(op: &SparseOperator) -> f64 {
    op.max_hermitian_defect()
}

fn require_hermitian(op: &SparseOperator) -> Result<()> {
    let defect = hermiticity_audit(op);
    if defect > HERMITIAN_TOL * op.max_abs().max(1.0) {
        return Err(Error::InvalidOperator { defect });
    }
    Ok(())
}

/// Options for [`lanczos_lowest_with`].
#[derive(Debug, Clone)]
pub struct LanczosConfig {
    pub k: usize,
    pub tol: f64,
    /// Budget of matrix-vector products.
    pub max_iter: usize,
    pub seed: u64,
    /// Krylov basis size before a restart; defaults to max(2k + 24, 48).
    pub basis_size: Option<usize>,
}

impl LanczosConfig {
    pub fn new(k: usize, tol: f64, max_iter: usize, seed: u64) -> Self {
        LanczosConfig {
            k,
            tol,
            max_iter,
            seed,
            basis_size: None,
        }
    }
}

pub fn lanczos_lowest(op: &SparseOperator, k: usize, tol: f64, max_iter: usize, seed: u64) -> Result<EigResult> {
    lanczos_lowest_with(op, &LanczosConfig::new(k, tol, max_iter, seed))
}

/// Scalar field the Krylov iteration runs in. Real operators use `f64`, which
/// halves memory traffic and lets the dense kernels use real GEMM.
trait Scalar: ComplexField<RealField = f64> + Copy {
    fn draw(rng: &mut ChaCha8Rng) -> Self;
    fn into_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        rng.random_range(-1.0..1.0)
    }

    fn into_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }

    fn into_complex(self) -> Complex64 {
        self
    }
}

/// Classical Gram–Schmidt against the columns of `v`, repeated once when the
/// first pass leaves less than [`REORTH_RATIO`] of the norm; returns the
/// accumulated projection coefficients.
fn orthogonalize<T: Scalar>(v: &DMatrixView<'_, T>, w: &mut DVector<T>) -> DVector<T> {
    let mut total = DVector::<T>::zeros(v.ncols());
    let mut before = w.norm();
    for _ in 0..2 {
        let coeffs = v.ad_mul(&*w);
        w.gemv(-T::one(), v, &coeffs, T::one());
        total += &coeffs;
        let after = w.norm();
        if after > REORTH_RATIO * before {
            break;
        }
        before = after;
    }
    total
}

fn random_unit<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> DVector<T> {
    let v = DVector::<T>::from_fn(n, |_, _| T::draw(rng));
    let s = v.norm();
    v.unscale(s)
}

/// Eigen-decomposition of a small Hermitian matrix, ascending.
fn small_eigh<T: Scalar>(h: DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn residual(op: &SparseOperator, x: &[Complex64], theta: f64) -> f64 {
    let ax = op.apply(x);
    ax.iter()
        .zip(x)
        .map(|(a, b)| (a - theta * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

struct Krylov<T> {
    theta: Vec<f64>,
    vectors: Vec<Vec<T>>,
    matvecs: usize,
}

/// Called with Ritz values, Ritz vectors and the matvec count; true stops the iteration.
type StopRule<'a, T> = dyn FnMut(&[f64], &[Vec<T>], usize) -> bool + 'a;

/// Thick-restart Lanczos iteration. Stops when the Ritz estimates β|y_last|
/// of the `k` lowest pairs drop below tolerance, the space is exhausted or the
/// budget is spent; the caller verifies with true residuals.
fn thick_restart<T: Scalar>(
    n: usize,
    cfg: &LanczosConfig,
    scale: f64,
    matvec: &dyn Fn(&[T], &mut [T]),
    estimates_done: &mut StopRule<'_, T>,
) -> Krylov<T> {
    let k = cfg.k;
    let p = cfg.basis_size.unwrap_or((2 * k + 24).max(48)).max(k + 2).min(n);
    let keep = (p / 2).max(k + 1).min(p - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v = DMatrix::<T>::zeros(n, p);
    v.set_column(0, &random_unit::<T>(&mut rng, n));
    let mut size = 1;
    let mut h = DMatrix::<T>::zeros(p, p);
    let mut w = DVector::<T>::zeros(n);
    let mut matvecs = 0usize;

    loop {
        let j = size - 1;
        matvec(&v.as_slice()[j * n..(j + 1) * n], w.as_mut_slice());
        matvecs += 1;
        let coeffs = orthogonalize(&v.columns(0, size), &mut w);
        for i in 0..j {
            h[(i, j)] = coeffs[i];
            h[(j, i)] = coeffs[i].conjugate();
        }
        h[(j, j)] = T::from_real(coeffs[j].real());
        let beta = w.norm();

        let exhausted = size == n;
        let out_of_budget = matvecs >= cfg.max_iter;
        let restart = size == p;
        let invariant = beta <= 1e-13 * scale;
        if !(restart || exhausted || out_of_budget || invariant || size % CHECK_EVERY == 0) {
            v.set_column(size, &w.unscale(beta));
            size += 1;
            continue;
        }

        let (theta, y) = small_eigh(h.view((0, 0), (size, size)).into_owned());
        let wanted = k.min(size);
        let estimates_ok = size >= k && (0..wanted).all(|i| beta * y[(j, i)].modulus() <= cfg.tol);

        if estimates_ok || exhausted || out_of_budget {
            let x = v.columns(0, size) * y.columns(0, wanted);
            let vectors: Vec<Vec<T>> = x
                .column_iter()
                .map(|c| c.unscale(c.norm()).as_slice().to_vec())
                .collect();
            let theta = theta[..wanted].to_vec();
            if estimates_done(&theta, &vectors, matvecs) || exhausted || out_of_budget {
                return Krylov {
                    theta,
                    vectors,
                    matvecs,
                };
            }
        }

        let next = if invariant {
            // invariant subspace: continue with a fresh direction
            let mut r = random_unit::<T>(&mut rng, n);
            orthogonalize(&v.columns(0, size), &mut r);
            let s = r.norm();
            r.unscale(s)
        } else {
            w.unscale(beta)
        };

        if restart {
            let kept = v.columns(0, size) * y.columns(0, keep);
            v.columns_mut(0, keep).copy_from(&kept);
            h.fill(T::zero());
            for (i, t) in theta.iter().take(keep).enumerate() {
                h[(i, i)] = T::from_real(*t);
            }
            size = keep;
        }
        v.set_column(size, &next);
        size += 1;
    }
}

pub fn lanczos_lowest_with(op: &SparseOperator, cfg: &LanczosConfig) -> Result<EigResult> {
    let n = op.dim();
    let k = cfg.k;
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one eigenpair".into()));
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} is not below the dimension {n}; use dense_lowest"
        )));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", cfg.tol)));
    }
    require_hermitian(op)?;
    let scale = op.max_abs().max(f64::MIN_POSITIVE);

    let mut residuals = Vec::new();
    let (theta, vectors, matvecs) = if op.is_real() {
        let mut check = |theta: &[f64], vs: &[Vec<f64>], _: usize| {
            residuals = theta
                .iter()
                .zip(vs)
                .map(|(&t, x)| {
                    let mut ax = vec![0.0; n];
                    op.matvec_real_into(x, &mut ax);
                    ax.iter().zip(x).map(|(a, b)| (a - t * b).powi(2)).sum::<f64>().sqrt()
                })
                .collect();
            residuals.iter().all(|&r| r <= cfg.tol)
        };
        let r = thick_restart::<f64>(n, cfg, scale, &|x, y| op.matvec_real_into(x, y), &mut check);
        let vectors = r
            .vectors
            .into_iter()
            .map(|v| v.into_iter().map(Scalar::into_complex).collect())
            .collect();
        (r.theta, vectors, r.matvecs)
    } else {
        let mut check = |theta: &[f64], vs: &[Vec<Complex64>], _: usize| {
            residuals = theta.iter().zip(vs).map(|(&t, x)| residual(op, x, t)).collect();
            residuals.iter().all(|&r| r <= cfg.tol)
        };
        let r = thick_restart::<Complex64>(n, cfg, scale, &|x, y| op.matvec_into(x, y), &mut check);
        (r.theta, r.vectors, r.matvecs)
    };
    let converged = theta.len() == k && residuals.len() == k && residuals.iter().all(|&r| r <= cfg.tol);
    Ok(EigResult {
        eigenvalues: theta,
        eigenvectors: vectors,
        residuals,
        iterations: matvecs,
        converged,
    })
}

/// Full diagonalization for dimensions up to [`DENSE_LIMIT`].
pub fn dense_lowest(op: &SparseOperator, k: usize) -> Result<EigResult> {
    let n = op.dim();
    if n > DENSE_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "dense eigensolver limited to dimension {DENSE_LIMIT}, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} out of range for dimension {n}")));
    }
    require_hermitian(op)?;
    let (values, vectors) = small_eigh::<Complex64>(op.to_dense());
    let eigenvectors: Vec<Vec<Complex64>> = (0..k)
        .map(|c| vectors.column(c).iter().copied().collect())
        .collect();
    let residuals = eigenvectors
        .iter()
        .zip(&values)
        .map(|(v, &t)| residual(op, v, t))
        .collect();
    Ok(EigResult {
        eigenvalues: values[..k].to_vec(),
        eigenvectors,
        residuals,
        iterations: 0,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn diagonal_example() {
        let op = SparseOperator::diagonal(&[3.0, 1.0, 2.0]);
        let r = lanczos_lowest(&op, 2, 1e-10, 100, 7).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((r.eigenvalues[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dense_examples() {
        let x = SparseOperator::from_triplets(2, &[(0, 1, c(1.0)), (1, 0, c(1.0))], true);
        let r = dense_lowest(&x, 2).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 1.0).abs() < 1e-14);
        let id = SparseOperator::identity(5);
        let r = dense_lowest(&id, 5).unwrap();
        assert!(r.eigenvalues.iter().all(|&e| (e - 1.0).abs() < 1e-14));
        assert!(matches!(
            dense_lowest(&SparseOperator::identity(DENSE_LIMIT + 1), 1),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn argument_errors() {
        let op = SparseOperator::diagonal(&[1.0, 2.0]);
        assert!(matches!(lanczos_lowest(&op, 2, 1e-8, 10, 0), Err(Error::InvalidArgument(_))));
        let bad = SparseOperator::from_triplets(3, &[(0, 1, c(1.0)), (1, 0, c(2.0)), (2, 2, c(1.0))], false);
        assert!(hermiticity_audit(&bad) > 0.0);
        assert!(matches!(lanczos_lowest(&bad, 1, 1e-8, 10, 0), Err(Error::InvalidOperator { .. })));
    }

    #[test]
    fn restarts_reach_tolerance() {
        // spread-out diagonal plus a weak off-diagonal chain
        let n = 400;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c(i as f64 * 0.5 + 1.0)));
            if i + 1 < n {
                t.push((i, i + 1, Complex64::new(0.1, 0.05)));
                t.push((i + 1, i, Complex64::new(0.1, -0.05)));
            }
        }
        let op = SparseOperator::from_triplets(n, &t, true);
        let cfg = LanczosConfig {
            basis_size: Some(20),
            ..LanczosConfig::new(3, 1e-9, 20_000, 1)
        };
        let r = lanczos_lowest_with(&op, &cfg).unwrap();
        assert!(r.converged);
        let d = dense_lowest(&op, 3).unwrap();
        for (a, b) in r.eigenvalues.iter().zip(&d.eigenvalues) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
