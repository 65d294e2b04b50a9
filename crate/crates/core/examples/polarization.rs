//! Sym(u₁ ⊗ … ⊗ uₙ) rebuilt from 2ⁿ tensor powers.

use num_complex::Complex64;
use vanhove::fock::{polarization_decompose, reconstruct_from_powers, symmetrize};

fn main() -> vanhove::Result<()> {
    let c = Complex64::new;
    let vs = vec![
        vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, -0.5)],
        vec![c(0.2, 0.3), c(-1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, -0.7), c(0.4, 0.4), c(1.0, 1.0)],
    ];
    let pairs = polarization_decompose(&vs)?;
    let rebuilt = reconstruct_from_powers(&pairs, vs.len());
    let direct = symmetrize(&vs)?;
    let err = rebuilt.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("{} powers, {} tensor entries, max error {err:.2e}", pairs.len(), direct.len());
    Ok(())
}
