//! Thick-restart Lanczos against dense diagonalization on a random Hermitian matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vanhove::fock::SparseOperator;
use vanhove::spectral::{dense_lowest, lanczos_lowest};

fn main() -> vanhove::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 200;
    let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = SparseOperator::from_dense(&((&a + a.adjoint()) * Complex64::new(0.5, 0.0)), true);

    let lz = lanczos_lowest(&h, 4, 1e-12, 20_000, 7)?;
    let dense = dense_lowest(&h, 4)?;
    println!("{} matvecs, converged {}", lz.iterations, lz.converged);
    for (i, (x, y)) in lz.eigenvalues.iter().zip(&dense.eigenvalues).enumerate() {
        println!("λ{i}: {x:+.14}  dense {y:+.14}  residual {:.1e}", lz.residuals[i]);
    }
    Ok(())
}
