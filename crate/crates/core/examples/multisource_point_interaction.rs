//! Two point sources: the matrix S(λ), the dressing φ(e0), the constant C(φ)
//! and the bound states of the associated point interaction.

use num_complex::Complex64;
use vanhove::multisource::{
    check_bounded_below, ground_energy_report, point_interaction_eigenvalues, s_matrix, SourceConfig,
};
use vanhove::yukawa::IbcParams;

fn main() -> vanhove::Result<()> {
    let params = vec![IbcParams::scattering_length(0.0, -0.1), IbcParams::scattering_length(0.7, -0.1)];
    let cfg = SourceConfig::new(vec![[0.0; 3], [1.0, 0.0, 0.0]], params, 1.0)?;

    println!("S(e0) =\n{:.6}", s_matrix(&cfg, cfg.e0())?);
    let g = ground_energy_report(&cfg)?;
    let coeffs: Vec<String> = g.dressing.coeffs.iter().map(|z: &Complex64| format!("{z:.6}")).collect();
    println!("φ coefficients [{}]", coeffs.join(", "));
    println!("C(φ) = {:.12}  (imaginary part {:.1e})", g.energy, g.im_part);

    for ev in point_interaction_eigenvalues(&cfg, (1e-8, 1e4))? {
        println!("det S = 0 at λ = {:.10}, energy {:.10}", ev.lambda, ev.energy);
    }
    let b = check_bounded_below(&cfg);
    println!("bottom of h̃ {:.6}, bounded below: {:?}", b.h_tilde_bottom, b.bounded_below);
    Ok(())
}
