//! Green's identity for the adjoint Laplacian on Yukawa functions around
//! three sources, in the A/B and X/Y boundary forms.

use num_complex::Complex64;
use vanhove::yukawa::{symmetry_defect, BoundaryForm, IbcParams, SourceSet, YukawaFunction, YukawaTerm};

fn main() -> vanhove::Result<()> {
    let src = SourceSet::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.5, 0.5]])?;
    let c = Complex64::new;
    let f = YukawaFunction::from_terms(vec![
        YukawaTerm::new(0, c(1.0, 0.5), c(0.8, 0.3))?,
        YukawaTerm::new(2, c(-0.4, 0.0), c(1.7, 0.0))?,
    ])?;
    let g = YukawaFunction::from_terms(vec![
        YukawaTerm::new(1, c(0.2, -1.0), c(1.1, -0.6))?,
        YukawaTerm::new(0, c(0.9, 0.1), c(0.5, 0.0))?,
    ])?;
    let params = [
        IbcParams::new(0.3, 2.0, 0.5, 1.0, 0.75)?,
        IbcParams::scattering_length(0.0, -0.2),
        IbcParams::identity(),
    ];
    println!("A/B defect {:.3e}", symmetry_defect(&src, &f, &g, BoundaryForm::AB)?.norm());
    println!("X/Y defect {:.3e}", symmetry_defect(&src, &f, &g, BoundaryForm::XY(&params))?.norm());
    Ok(())
}
