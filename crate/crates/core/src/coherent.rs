//! Coherent vectors ε(u) and the Weyl (dressing) operators W(φ).
//!
//! A coherent vector has sector components ε(u)⁽ⁿ⁾ = u^{⊗n}/√(n!), so it is
//! stored lazily as (u, prefactor). W(φ) is defined only through its action
//!
//!   W(φ) ε(u) = e^{−⟨φ,u⟩ − ‖φ‖²/2} ε(u + φ),
//!
//! which is exact. Matrix-level comparisons go through [`expand_to_fock`],
//! and every truncated comparison carries the tail that was cut off.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{annihilator, creator, second_quantize_diagonal, FockBasis};
use crate::radial_grid::OneParticleVector;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// prefactor · ε(u).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentVector {
    pub u: OneParticleVector,
    pub prefactor: Complex64,
}

impl CoherentVector {
    pub fn new(u: OneParticleVector, prefactor: Complex64) -> Self {
        CoherentVector { u, prefactor }
    }

    /// ε(u) with unit prefactor.
    pub fn exponential(u: OneParticleVector) -> Self {
        CoherentVector {
            u,
            prefactor: Complex64::new(1.0, 0.0),
        }
    }

    /// Normalized e^{−‖u‖²/2} ε(u).
    pub fn normalized(u: OneParticleVector) -> Self {
        let prefactor = Complex64::new((-0.5 * u.norm_sqr()).exp(), 0.0);
        CoherentVector { u, prefactor }
    }

    /// The Fock vacuum ε(0).
    pub fn vacuum(modes: usize) -> Self {
        Self::exponential(OneParticleVector::zeros(modes))
    }

    pub fn modes(&self) -> usize {
        self.u.len()
    }

    /// |prefactor|²·e^{‖u‖²}.
    pub fn norm_sqr(&self) -> f64 {
        self.prefactor.norm_sqr() * self.u.norm_sqr().exp()
    }
}

fn same_modes(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidArgument(format!("mode counts differ: {a} vs {b}")));
    }
    Ok(())
}

/// ⟨ε(v), ε(u)⟩ = conj(c_v) c_u e^{⟨v,u⟩}.
pub fn coherent_inner(v: &CoherentVector, u: &CoherentVector) -> Result<Complex64> {
    same_modes(v.modes(), u.modes())?;
    Ok(v.prefactor.conj() * u.prefactor * v.u.inner(&u.u).exp())
}

/// W(φ) applied to a coherent vector.
pub fn weyl_apply(phi: &OneParticleVector, x: &CoherentVector) -> Result<CoherentVector> {
    same_modes(phi.len(), x.modes())?;
    let factor = (-phi.inner(&x.u) - 0.5 * phi.norm_sqr()).exp();
    Ok(CoherentVector {
        u: &x.u + phi,
        prefactor: x.prefactor * factor,
    })
}

/// Σ_{n > n_max} qⁿ/n!.
pub fn poisson_tail(q: f64, n_max: usize) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if q > n_max as f64 + 1.0 {
        let mut term = 1.0;
        let mut partial = 1.0;
        for n in 1..=n_max {
            term *= q / n as f64;
            partial += term;
        }
        return (q.exp() - partial).max(0.0);
    }
    let mut term = 1.0;
    for n in 1..=n_max + 1 {
        term *= q / n as f64;
    }
    let mut sum = 0.0;
    let mut n = n_max + 1;
    while term > 1e-18 * sum || sum == 0.0 {
        sum += term;
        n += 1;
        term *= q / n as f64;
        if term == 0.0 {
            break;
        }
    }
    sum
}

/// Dense truncation of a coherent vector plus the norm of the discarded part.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub state: Vec<Complex64>,
    /// ‖(1 − P) x‖ where P projects onto sectors ≤ n_max.
    pub tail_bound: f64,
}

impl Expansion {
    /// Discarded fraction of the squared norm.
    pub fn tail_mass(&self) -> f64 {
        let kept: f64 = self.state.iter().map(|c| c.norm_sqr()).sum();
        let t2 = self.tail_bound * self.tail_bound;
        if kept + t2 == 0.0 {
            0.0
        } else {
            t2 / (kept + t2)
        }
    }
}

/// Occupation-basis coefficients c·Π u_i^{n_i}/√(n_i!) of prefactor·ε(u).
pub fn expand_to_fock(x: &CoherentVector, basis: &FockBasis) -> Result<Expansion> {
    same_modes(x.modes(), basis.modes())?;
    let n_max = basis.max_particles();
    // powers[i][n] = u_i^n / √(n!)
    let powers: Vec<Vec<Complex64>> = x
        .u
        .iter()
        .map(|ui| {
            let mut row = Vec::with_capacity(n_max + 1);
            let mut p = Complex64::new(1.0, 0.0);
            row.push(p);
            for n in 1..=n_max {
                p *= ui / (n as f64).sqrt();
                row.push(p);
            }
            row
        })
        .collect();
    let state = (0..basis.dim())
        .map(|s| {
            basis
                .occupation(s)
                .iter()
                .enumerate()
                .fold(x.prefactor, |acc, (i, &n)| acc * powers[i][n as usize])
        })
        .collect();
    let tail_bound = (x.prefactor.norm_sqr() * poisson_tail(x.u.norm_sqr(), n_max)).sqrt();
    Ok(Expansion { state, tail_bound })
}

/// ⟨m|W(φ)|n⟩ for one mode, 0 ≤ m, n ≤ size − 1, read off from the coherent
/// action by expanding both sides of W(φ)ε(u) = e^{−φ̄u−|φ|²/2}ε(u+φ) in u.
fn single_mode_weyl(phi: Complex64, size: usize) -> Vec<Vec<Complex64>> {
    let fact: Vec<f64> = (0..size).scan(1.0, |f, k| {
        let out = *f;
        *f *= (k + 1) as f64;
        Some(out)
    }).collect();
    let gauss = (-0.5 * phi.norm_sqr()).exp();
    let minus_conj = -phi.conj();
    let mut table = vec![vec![C0; size]; size];
    for (m, row) in table.iter_mut().enumerate() {
        for (n, slot) in row.iter_mut().enumerate() {
            let mut acc = C0;
            for l in 0..=m.min(n) {
                let binom = fact[m] / (fact[l] * fact[m - l]);
                acc += minus_conj.powi((n - l) as i32) / fact[n - l] * binom * phi.powi((m - l) as i32);
            }
            *slot = acc * gauss * (fact[n] / fact[m]).sqrt();
        }
    }
    table
}

/// P_out W(φ) x for an arbitrary vector x on `from`, projected onto `to`.
/// Both bases must have the same mode count.
pub fn weyl_apply_truncated(
    phi: &OneParticleVector,
    x: &[Complex64],
    from: &FockBasis,
    to: &FockBasis,
) -> Result<Vec<Complex64>> {
    same_modes(phi.len(), from.modes())?;
    same_modes(from.modes(), to.modes())?;
    if x.len() != from.dim() {
        return Err(Error::InvalidArgument("state length does not match basis".into()));
    }
    let size = from.max_particles().max(to.max_particles()) + 1;
    let tables: Vec<Vec<Vec<Complex64>>> = phi.iter().map(|&p| single_mode_weyl(p, size)).collect();
    let support: Vec<usize> = (0..x.len()).filter(|&s| x[s] != C0).collect();
    Ok((0..to.dim())
        .map(|row| {
            let out_occ = to.occupation(row);
            support
                .iter()
                .map(|&col| {
                    let in_occ = from.occupation(col);
                    let mut w = x[col];
                    for (i, table) in tables.iter().enumerate() {
                        w *= table[out_occ[i] as usize][in_occ[i] as usize];
                    }
                    w
                })
                .sum()
        })
        .collect())
}

/// The scalar G(T,φ) = ⟨φ,Tu⟩ − ⟨Tφ,u⟩ + ⟨φ,Tφ⟩ for diagonal T.
pub fn pull_through_scalar(
    t_energies: &[f64],
    phi: &OneParticleVector,
    u: &OneParticleVector,
) -> Result<Complex64> {
    same_modes(t_energies.len(), phi.len())?;
    same_modes(phi.len(), u.len())?;
    let t_phi = phi.scale_diagonal(t_energies);
    let t_u = u.scale_diagonal(t_energies);
    Ok(phi.inner(&t_u) - t_phi.inner(u) + phi.inner(&t_phi))
}

/// Largest discarded norm fraction allowed for the pull-through comparison.
pub const PULL_THROUGH_TAIL_MASS: f64 = 1e-10;

/// ‖W(−φ)dΓ(T)W(φ)ε(u) − [dΓ(T) + a*(Tφ) + a(Tφ) + G(T,φ)]ε(u)‖ on `basis`.
///
/// The left side is built by displacing ε(u) exactly, expanding, applying
/// dΓ(T) as a matrix, then projecting W(−φ) of the result back onto `basis`.
/// Both sides are evaluated on a working basis with twice the particle cutoff
/// so that nothing above `basis` leaks back into the compared sectors.
pub fn pull_through_defect(
    t_energies: &[f64],
    phi: &OneParticleVector,
    u: &OneParticleVector,
    basis: &FockBasis,
) -> Result<f64> {
    same_modes(t_energies.len(), basis.modes())?;
    same_modes(phi.len(), basis.modes())?;
    same_modes(u.len(), basis.modes())?;
    let n_max = basis.max_particles();
    let shifted = &(u + phi);
    for (name, v) in [("u", u), ("u + phi", shifted)] {
        let q = v.norm_sqr();
        let mass = poisson_tail(q, n_max) * (-q).exp();
        if mass > PULL_THROUGH_TAIL_MASS {
            return Err(Error::Precondition(format!(
                "coherent tail of eps({name}) beyond n_max = {n_max} is {mass:e}"
            )));
        }
    }
    let work = FockBasis::new(basis.modes(), 2 * n_max.max(1))?;
    let d_gamma = second_quantize_diagonal(&work, t_energies)?;

    let displaced = weyl_apply(phi, &CoherentVector::exponential(u.clone()))?;
    let x = expand_to_fock(&displaced, &work)?.state;
    let y = d_gamma.apply(&x);
    let minus_phi = -phi;
    let lhs = weyl_apply_truncated(&minus_phi, &y, &work, basis)?;

    let t_phi = phi.scale_diagonal(t_energies);
    let rhs_op = d_gamma
        .add(&creator(&work, &t_phi)?)
        .add(&annihilator(&work, &t_phi)?);
    let e = expand_to_fock(&CoherentVector::exponential(u.clone()), &work)?.state;
    let g = pull_through_scalar(t_energies, phi, u)?;
    let rhs = rhs_op.apply(&e);

    Ok(lhs
        .iter()
        .zip(rhs.iter().zip(&e))
        .map(|(l, (r, ei))| (l - (r + g * ei)).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[(f64, f64)]) -> OneParticleVector {
        OneParticleVector::new(xs.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
    }

    #[test]
    fn inner_products() {
        let z = CoherentVector::vacuum(3);
        assert_eq!(coherent_inner(&z, &z).unwrap(), Complex64::new(1.0, 0.0));
        let u = CoherentVector::exponential(v(&[(0.1, 0.2), (-0.3, 0.0), (0.0, 0.4)]));
        let nn = coherent_inner(&u, &u).unwrap();
        assert_relative_eq!(nn.re, u.u.norm_sqr().exp(), max_relative = 1e-15);
        let w = CoherentVector::exponential(v(&[(0.5, 0.0), (0.1, -0.1), (0.2, 0.2)]));
        let dist = coherent_inner(&w, &w).unwrap() + coherent_inner(&u, &u).unwrap()
            - coherent_inner(&w, &u).unwrap()
            - coherent_inner(&u, &w).unwrap();
        let expect = w.u.norm_sqr().exp() + u.u.norm_sqr().exp() - 2.0 * w.u.inner(&u.u).exp().re;
        assert_relative_eq!(dist.re, expect, max_relative = 1e-12);
        assert_eq!(coherent_inner(&u, &w).unwrap(), coherent_inner(&w, &u).unwrap().conj());
    }

    #[test]
    fn weyl_inverse_and_identity() {
        let phi = v(&[(0.2, -0.1), (0.0, 0.3)]);
        let x = CoherentVector::new(v(&[(0.1, 0.1), (-0.2, 0.05)]), Complex64::new(0.7, 0.2));
        assert_eq!(weyl_apply(&OneParticleVector::zeros(2), &x).unwrap(), x);
        let back = weyl_apply(&-&phi, &weyl_apply(&phi, &x).unwrap()).unwrap();
        assert!((back.prefactor - x.prefactor).norm() < 1e-15);
        assert!((&back.u - &x.u).norm() < 1e-16);
    }

    #[test]
    fn expansion_examples() {
        let b = FockBasis::new(2, 5).unwrap();
        let vac = expand_to_fock(&CoherentVector::vacuum(2), &b).unwrap();
        assert_eq!(vac.state[0], Complex64::new(1.0, 0.0));
        assert!(vac.state[1..].iter().all(|c| *c == C0));
        assert_eq!(vac.tail_bound, 0.0);

        let b1 = FockBasis::new(1, 6).unwrap();
        let e = expand_to_fock(&CoherentVector::exponential(v(&[(0.2, 0.0)])), &b1).unwrap();
        let mut fact = 1.0;
        for n in 0..=6 {
            if n > 0 {
                fact *= n as f64;
            }
            assert_relative_eq!(e.state[n].re, 0.2f64.powi(n as i32) / fact.sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn poisson_tail_regimes() {
        assert_relative_eq!(poisson_tail(1.0, 0), 1f64.exp() - 1.0, max_relative = 1e-14);
        assert_relative_eq!(poisson_tail(30.0, 3), 30f64.exp() - 1.0 - 30.0 - 450.0 - 4500.0, max_relative = 1e-14);
        let q: f64 = 0.16;
        let direct: f64 = (9..40).map(|n| q.powi(n) / (1..=n).map(|k| k as f64).product::<f64>()).sum();
        assert_relative_eq!(poisson_tail(q, 8), direct, max_relative = 1e-13);
        assert_eq!(poisson_tail(0.0, 3), 0.0);
    }

    #[test]
    fn truncated_weyl_matches_coherent_action() {
        let b = FockBasis::new(2, 10).unwrap();
        let small = FockBasis::new(2, 4).unwrap();
        let phi = v(&[(0.15, 0.05), (-0.1, 0.2)]);
        let x = CoherentVector::exponential(v(&[(0.1, -0.1), (0.05, 0.0)]));
        let exact = expand_to_fock(&weyl_apply(&phi, &x).unwrap(), &small).unwrap().state;
        let via = weyl_apply_truncated(&phi, &expand_to_fock(&x, &b).unwrap().state, &b, &small).unwrap();
        for (a, c) in exact.iter().zip(&via) {
            assert!((a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn pull_through_zero_phi_is_exact() {
        let b = FockBasis::new(2, 6).unwrap();
        let t = [1.3, 2.1];
        let u = v(&[(0.1, 0.1), (0.2, -0.05)]);
        assert_eq!(pull_through_defect(&t, &OneParticleVector::zeros(2), &u, &b).unwrap(), 0.0);
    }

    #[test]
    fn pull_through_rejects_heavy_tails() {
        let b = FockBasis::new(2, 3).unwrap();
        let big = v(&[(1.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(
            pull_through_defect(&[1.0, 1.0], &big, &big, &b),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dressing_scalar_is_inverse_form() {
        let t = [0.5, 1.5, 3.0];
        let psi = v(&[(0.2, 0.1), (-0.1, 0.0), (0.0, 0.3)]);
        let phi = psi.scale_diagonal(&t.map(|x| 1.0 / x));
        let u = v(&[(0.3, 0.3), (0.1, -0.2), (0.0, 0.1)]);
        let g = pull_through_scalar(&t, &phi, &u).unwrap();
        let expect: f64 = psi.iter().zip(&t).map(|(p, ti)| p.norm_sqr() / ti).sum();
        assert!((g - expect).norm() < 1e-15);
    }
}
