//! Lowest eigenvalues of H_Λ − E_Λ at the top of the grid against the
//! interior-boundary-condition prediction E_min = g²√e0/4π.

use vanhove::fock::FockBasis;
use vanhove::radial_grid::{build_radial_grid, QuadratureScheme};
use vanhove::renorm::{ibc_spectrum_check, SolverConfig};

fn main() -> vanhove::Result<()> {
    // A smaller truncation than the default keeps this under a second.
    let (g, e0) = (1.0, 1.0);
    let grid = build_radial_grid(40.0, 12, QuadratureScheme::GaussLegendre)?;
    let basis = FockBasis::new(12, 4)?;
    let r = ibc_spectrum_check(&grid, &basis, g, e0, 3, &SolverConfig::default())?;
    println!("dim {}", basis.dim());
    println!("E_min  computed {:.12}  predicted {:.12}", r.e_min_computed, r.e_min_predicted);
    println!("gap    computed {:.8}  grid edge {:.8}", r.gap_computed, r.gap_predicted);
    println!("lowest {:?}", r.eigenvalues);
    println!("simple {}  energy_ok {}  gap_ok {}", r.simple, r.energy_ok, r.gap_ok);
    Ok(())
}
