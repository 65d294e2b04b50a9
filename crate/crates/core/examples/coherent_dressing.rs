//! The cutoff ground state is the displaced vacuum W(−g h⁻¹χ_Λ)Ω; its Fock
//! expansion and the mass lost above the particle cutoff.

use num_complex::Complex64;
use vanhove::coherent::{coherent_inner, expand_to_fock, weyl_apply, CoherentVector};
use vanhove::fock::FockBasis;
use vanhove::radial_grid::{build_radial_grid, QuadratureScheme};
use vanhove::renorm::dressing_vector;

fn main() -> vanhove::Result<()> {
    let grid = build_radial_grid(40.0, 16, QuadratureScheme::GaussLegendre)?;
    let phi = dressing_vector(&grid, 1.0, 1.0)?;
    println!("‖h⁻¹χ‖² = {:.6}", phi.norm_sqr());

    let vacuum = CoherentVector::vacuum(grid.len());
    let dressed = weyl_apply(&phi, &vacuum)?;
    println!("‖W(φ)Ω‖² = {:.15}", dressed.norm_sqr());

    for n_max in 1..=4 {
        let basis = FockBasis::new(grid.len(), n_max)?;
        let e = expand_to_fock(&dressed, &basis)?;
        println!("n_max {n_max}: dim {:>5}  tail mass {:.3e}", basis.dim(), e.tail_mass());
    }

    // Weyl operators compose up to a phase.
    let psi = &phi * Complex64::new(0.0, 0.5);
    let x = weyl_apply(&psi, &dressed)?;
    let y = weyl_apply(&(&phi + &psi), &vacuum)?;
    let ratio = coherent_inner(&y, &x)? / y.norm_sqr();
    println!("W(ψ)W(φ)Ω vs W(φ+ψ)Ω: ratio {ratio:.12}, |ratio| {:.15}", ratio.norm());
    Ok(())
}
