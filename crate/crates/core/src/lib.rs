//! Exactly solvable point-source creation/annihilation models.
//!
//! The crate builds ultraviolet-cutoff van Hove Hamiltonians
//! dΓ(h) + a(χ_Λ) + a*(χ_Λ) on a truncated bosonic Fock space, runs the
//! renormalization flow H_Λ − E_Λ, and checks the numbers against the exact
//! interior-boundary-condition (IBC) results: the ground energy g²√E₀/4π,
//! the coherent ground state, the multi-source S(λ) construction and the
//! algebraic identities behind them.
//!
//! Modules, bottom up:
//!
//! * [`radial_grid`]: s-wave momentum quadrature, couplings, E_Λ.
//! * [`yukawa`]: closed-form algebra on spans of Yukawa functions f_γ(·−ξ).
//! * [`fock`]: occupation basis, sparse ladder operators, polarization.
//! * [`coherent`]: ε(u), W(φ), truncation tails, pull-through identities.
//! * [`spectral`]: thick-restart Lanczos and a dense fallback.
//! * [`renorm`]: cutoff Hamiltonian, flow driver, IBC spectrum checks.
//! * [`multisource`]: G^λ, S(λ), φ(λ), C(φ) and point-interaction roots.
//! * [`cli`]: config-driven runner behind the `vanhove` binary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coherent;
pub mod error;
pub mod fock;
pub mod multisource;
pub mod radial_grid;
pub mod renorm;
pub mod spectral;
pub mod yukawa;

pub use error::{Error, Result};
