//! Randomized identity suites behind `vanhove identities`.
//!
//! Each suite draws `trials` independent instances from a ChaCha8 stream
//! seeded by (seed, suite, trial), so results do not depend on scheduling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherent::{coherent_inner, expand_to_fock, pull_through_defect, pull_through_scalar, weyl_apply, CoherentVector};
use crate::error::Result;
use crate::fock::{annihilator, creator, polarization_decompose, reconstruct_from_powers, symmetrize, FockBasis};
use crate::multisource::{ground_energy_report, kernel_identity_defect, sample_ker_x, SourceConfig};
use crate::radial_grid::OneParticleVector;
use crate::renorm::{c_constant, ibc_ground_energy};
use crate::yukawa::{
    symmetry_defect, two_sector_ibc_symmetry, BoundaryForm, IbcParams, Point3, SourceSet, TwoSectorVector,
    YukawaFunction, YukawaTerm,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    /// Trials skipped because the random instance was inadmissible.
    pub skipped: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteResult>,
    pub all_pass: bool,
}

fn rng_for(seed: u64, suite: u64, trial: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(suite);
    r.set_word_pos(trial as u128 * 1024);
    r
}

fn complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    (0..d).map(|_| complex(rng)).collect()
}

/// Random vector with norm drawn uniformly in (0, max_norm].
fn bounded(rng: &mut ChaCha8Rng, d: usize, max_norm: f64) -> OneParticleVector {
    let v = OneParticleVector::new(vector(rng, d));
    let target = max_norm * rng.random_range(0.05..=1.0);
    &v * Complex64::new(target / v.norm(), 0.0)
}

/// θ uniform, α away from zero, δ fixed by αδ − βγ = 1.
pub fn random_params(rng: &mut ChaCha8Rng) -> IbcParams {
    let theta = rng.random_range(0.0..2.0 * PI);
    let alpha = rng.random_range(0.3..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let beta = rng.random_range(-2.0..2.0);
    let gamma = rng.random_range(-2.0..2.0);
    IbcParams {
        theta,
        alpha,
        beta,
        gamma,
        delta: (1.0 + beta * gamma) / alpha,
    }
}

/// 1–`max` sources in [−2, 2]³ at mutual distance ≥ 0.3.
pub fn random_sources(rng: &mut ChaCha8Rng, max: usize) -> SourceSet {
    let n = rng.random_range(1..=max);
    let mut pts: Vec<Point3> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = [
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        ];
        let far = pts
            .iter()
            .all(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt() >= 0.3);
        if far {
            pts.push(p);
        }
    }
    SourceSet::new(pts).expect("points are distinct")
}

/// 1–4 terms on random sources with Re γ ∈ [0.2, 3], Im γ ∈ [−1, 1].
pub fn random_yukawa(rng: &mut ChaCha8Rng, sources: usize) -> YukawaFunction {
    let terms = (0..rng.random_range(1..=4))
        .map(|_| {
            let decay = Complex64::new(rng.random_range(0.2..3.0), rng.random_range(-1.0..1.0));
            YukawaTerm::new(rng.random_range(0..sources), complex(rng), decay).expect("positive decay")
        })
        .collect();
    YukawaFunction::from_terms(terms).expect("valid terms")
}

fn run_suite<F>(name: &'static str, id: u64, seed: u64, trials: usize, tolerance: f64, f: F) -> SuiteResult
where
    F: Fn(&mut ChaCha8Rng) -> Result<Option<f64>> + Sync,
{
    let errors: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| f(&mut rng_for(seed, id, t)).unwrap_or(Some(f64::INFINITY)))
        .collect();
    let skipped = errors.iter().filter(|e| e.is_none()).count();
    let max_error = errors.iter().flatten().fold(0.0_f64, |m, &e| if e.is_nan() { f64::INFINITY } else { m.max(e) });
    SuiteResult {
        name,
        trials,
        skipped,
        max_error,
        tolerance,
        pass: max_error <= tolerance && skipped < trials.max(1),
    }
}

fn ccr(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let modes = 3;
    let basis = FockBasis::new(modes, 4)?;
    let f = OneParticleVector::new(vector(rng, modes));
    let g = OneParticleVector::new(vector(rng, modes));
    let a = annihilator(&basis, &f)?;
    let ad = creator(&basis, &g)?;
    // restricted to sectors below the cutoff the relation is exact
    let top = basis.sector(basis.max_particles());
    let x: Vec<Complex64> = (0..basis.dim())
        .map(|s| if top.contains(&s) { Complex64::new(0.0, 0.0) } else { complex(rng) })
        .collect();
    let lhs: Vec<Complex64> = a
        .apply(&ad.apply(&x))
        .iter()
        .zip(ad.apply(&a.apply(&x)))
        .map(|(p, q)| p - q)
        .collect();
    let fg = f.inner(&g);
    let norm: f64 = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let defect = lhs
        .iter()
        .zip(&x)
        .map(|(l, xi)| (l - fg * xi).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / norm;
    let adjoint = creator(&basis, &f)?
        .add(&a.conj_transpose().scale(-1.0))
        .max_abs();
    Ok(Some(defect.max(adjoint)))
}

fn polarization(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let mut worst = 0.0_f64;
    for n in 1..=5 {
        for d in 1..=4 {
            let vs: Vec<Vec<Complex64>> = (0..n).map(|_| vector(rng, d)).collect();
            let direct = symmetrize(&vs)?;
            let rebuilt = reconstruct_from_powers(&polarization_decompose(&vs)?, n);
            for (a, b) in direct.iter().zip(&rebuilt) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    Ok(Some(worst))
}

fn weyl(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let m = 4;
    let p1 = bounded(rng, m, 0.5);
    let p2 = bounded(rng, m, 0.5);
    let x = CoherentVector::new(bounded(rng, m, 0.5), complex(rng));
    let y = CoherentVector::new(bounded(rng, m, 0.5), complex(rng));

    let before = coherent_inner(&x, &y)?;
    let after = coherent_inner(&weyl_apply(&p1, &x)?, &weyl_apply(&p1, &y)?)?;
    let unitarity = (after - before).norm() / before.norm();

    let there = weyl_apply(&p2, &weyl_apply(&p1, &x)?)?;
    let back = weyl_apply(&-&p1, &weyl_apply(&-&p2, &there)?)?;
    let inverse = (back.prefactor - x.prefactor).norm() / x.prefactor.norm() + (&back.u - &x.u).norm();

    let phase = Complex64::new(0.0, -p2.inner(&p1).im).exp();
    let joint = weyl_apply(&(&p1 + &p2), &x)?;
    let composition = (there.prefactor - phase * joint.prefactor).norm() / joint.prefactor.norm()
        + (&there.u - &joint.u).norm();
    Ok(Some(unitarity.max(inverse).max(composition)))
}

fn coherent_eigen(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let m = 3;
    let basis = FockBasis::new(m, 6)?;
    let u = bounded(rng, m, 0.8);
    let f = OneParticleVector::new(vector(rng, m));
    let x = expand_to_fock(&CoherentVector::exponential(u.clone()), &basis)?.state;
    let ax = annihilator(&basis, &f)?.apply(&x);
    let fu = f.inner(&u);
    let top = basis.sector(basis.max_particles());
    let defect = (0..basis.dim())
        .filter(|s| !top.contains(s))
        .map(|s| (ax[s] - fu * x[s]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(Some(defect))
}

fn pull_through(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let m = 3;
    let basis = FockBasis::new(m, 8)?;
    let t: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..3.0)).collect();
    let phi = bounded(rng, m, 0.25);
    let u = bounded(rng, m, 0.25);
    Ok(Some(pull_through_defect(&t, &phi, &u, &basis)?))
}

fn dressing_constant(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let m = 5;
    let t: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..3.0)).collect();
    let psi = OneParticleVector::new(vector(rng, m));
    let phi = psi.scale_diagonal(&t.iter().map(|x| 1.0 / x).collect::<Vec<_>>());
    let u = OneParticleVector::new(vector(rng, m));
    let g = pull_through_scalar(&t, &phi, &u)?;
    let expect: f64 = psi.iter().zip(&t).map(|(p, ti)| p.norm_sqr() / ti).sum();
    Ok(Some((g - expect).norm() / expect))
}

fn symmetry(rng: &mut ChaCha8Rng, xy: bool) -> Result<Option<f64>> {
    let src = random_sources(rng, 3);
    let f = random_yukawa(rng, src.len());
    let g = random_yukawa(rng, src.len());
    let params: Vec<IbcParams> = (0..src.len()).map(|_| random_params(rng)).collect();
    let form = if xy {
        BoundaryForm::XY(&params)
    } else {
        BoundaryForm::AB
    };
    Ok(Some(symmetry_defect(&src, &f, &g, form)?.norm()))
}

fn ibc_vector(rng: &mut ChaCha8Rng, g: f64) -> Result<TwoSectorVector> {
    let vacuum = complex(rng);
    let singular = Complex64::new(rng.random_range(0.2..3.0), rng.random_range(-1.0..1.0));
    let mut one = YukawaFunction::single(0, g * vacuum, singular)?;
    let d1 = Complex64::new(rng.random_range(0.2..3.0), 0.0);
    let d2 = Complex64::new(rng.random_range(0.2..3.0), rng.random_range(-1.0..1.0));
    one = one.add(&YukawaFunction::regular_difference(0, complex(rng), d1, d2)?);
    Ok(TwoSectorVector { vacuum, one })
}

fn two_sector(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let g = rng.random_range(-2.0..2.0);
    let e0 = rng.random_range(0.1..3.0);
    let phi = ibc_vector(rng, g)?;
    let psi = ibc_vector(rng, g)?;
    Ok(Some(two_sector_ibc_symmetry(&phi, &psi, g, e0)?.norm()))
}

fn random_config(rng: &mut ChaCha8Rng) -> Result<SourceConfig> {
    let src = random_sources(rng, 3);
    let params = (0..src.len()).map(|_| random_params(rng)).collect();
    SourceConfig::new(src.positions().to_vec(), params, rng.random_range(0.2..3.0))
}

fn realness(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let cfg = random_config(rng)?;
    match ground_energy_report(&cfg) {
        Ok(r) => Ok(Some(r.im_part.abs())),
        Err(crate::Error::NotInRange { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn kernel_identity(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let cfg = random_config(rng)?;
    let l1 = cfg.e0() * rng.random_range(1.2..3.0);
    let l2 = cfg.e0() * rng.random_range(0.2..0.8);
    let free = vector(rng, cfg.len());
    let psi = match sample_ker_x(&cfg, (l1, l2), &free) {
        Ok(p) => p,
        Err(crate::Error::Precondition(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    match kernel_identity_defect(&cfg, &psi) {
        Ok(d) => Ok(Some(d.norm())),
        Err(crate::Error::NotInRange { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn constants(rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
    let g = rng.random_range(-3.0..3.0);
    let e0 = rng.random_range(0.01..10.0);
    let exact = ibc_ground_energy(g, e0)?;
    let via_c = c_constant(g, e0.sqrt(), e0)?;
    let cfg = SourceConfig::new(vec![[0.0; 3]], vec![IbcParams::coupling(g)?], e0)?;
    let via_sources = ground_energy_report(&cfg)?.energy;
    let scale = exact.abs().max(f64::MIN_POSITIVE);
    Ok(Some(((via_c - exact).abs() / scale).max((via_sources - exact).abs() / scale)))
}

/// Runs every suite; `all_pass` is their conjunction.
pub fn run_identity_suites(seed: u64, trials: usize) -> IdentityReport {
    let suites = vec![
        run_suite("ccr", 1, seed, trials, 1e-12, ccr),
        run_suite("polarization", 2, seed, trials, 1e-12, polarization),
        run_suite("weyl", 3, seed, trials, 1e-12, weyl),
        run_suite("coherent_eigenvector", 4, seed, trials, 1e-12, coherent_eigen),
        run_suite("pull_through", 5, seed, trials, 1e-8, pull_through),
        run_suite("dressing_constant", 6, seed, trials, 1e-12, dressing_constant),
        run_suite("symmetry_ab", 7, seed, trials, 1e-12, |r| symmetry(r, false)),
        run_suite("symmetry_xy", 8, seed, trials, 1e-12, |r| symmetry(r, true)),
        run_suite("two_sector_ibc", 9, seed, trials, 1e-12, two_sector),
        run_suite("realness", 10, seed, trials, 1e-10, realness),
        run_suite("kernel_identity", 11, seed, trials, 1e-10, kernel_identity),
        run_suite("constants", 12, seed, trials, 1e-12, constants),
    ];
    let all_pass = suites.iter().all(|s| s.pass);
    IdentityReport {
        seed,
        trials,
        suites,
        all_pass,
    }
}
