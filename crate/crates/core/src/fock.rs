//! Truncated bosonic Fock space over m modes with total occupation ≤ n_max.
//!
//! Basis states are occupation vectors ordered by total particle number and,
//! inside a sector, lexicographically descending ((n,0,…,0) first). Ranks
//! are computed with the combinatorial number system, so no hash maps are
//! needed.

use std::ops::Range;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::radial_grid::OneParticleVector;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Largest basis this crate will enumerate.
pub const MAX_FOCK_DIM: usize = 20_000_000;

#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: usize,
    n_max: usize,
    occupations: Vec<u8>,
    sector_offsets: Vec<usize>,
    // binom[a][b] = C(a, b) for b ≤ modes
    binom: Vec<Vec<usize>>,
}

impl FockBasis {
    pub fn new(modes: usize, n_max: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("Fock basis needs at least one mode".into()));
        }
        if n_max > u8::MAX as usize {
            return Err(Error::ResourceLimit(format!("particle cutoff {n_max} exceeds 255")));
        }
        let rows = modes + n_max + 1;
        let mut binom = vec![vec![0usize; modes + 1]; rows];
        for a in 0..rows {
            binom[a][0] = 1;
            for b in 1..=modes.min(a) {
                binom[a][b] = binom[a - 1][b - 1].saturating_add(if b < a { binom[a - 1][b] } else { 0 });
            }
        }
        // sector n has C(n + modes - 1, modes - 1) states
        let mut sector_offsets = vec![0usize; n_max + 2];
        for n in 0..=n_max {
            let size = binom[n + modes - 1][modes - 1];
            sector_offsets[n + 1] = sector_offsets[n].saturating_add(size);
        }
        let dim = sector_offsets[n_max + 1];
        if dim > MAX_FOCK_DIM || dim.saturating_mul(modes) > 8 * MAX_FOCK_DIM {
            return Err(Error::ResourceLimit(format!(
                "Fock dimension {dim} for {modes} modes and {n_max} particles exceeds {MAX_FOCK_DIM}"
            )));
        }
        let mut occupations = Vec::with_capacity(dim * modes);
        let mut scratch = vec![0u8; modes];
        for n in 0..=n_max {
            push_sector(&mut occupations, &mut scratch, 0, n);
        }
        debug_assert_eq!(occupations.len(), dim * modes);
        Ok(FockBasis {
            modes,
            n_max,
            occupations,
            sector_offsets,
            binom,
        })
    }

    pub fn dim(&self) -> usize {
        self.sector_offsets[self.n_max + 1]
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn max_particles(&self) -> usize {
        self.n_max
    }

    pub fn occupation(&self, index: usize) -> &[u8] {
        &self.occupations[index * self.modes..(index + 1) * self.modes]
    }

    pub fn total(&self, index: usize) -> usize {
        self.occupation(index).iter().map(|&n| n as usize).sum()
    }

    /// Ordinal range of the n-particle sector.
    pub fn sector(&self, n: usize) -> Range<usize> {
        self.sector_offsets[n]..self.sector_offsets[n + 1]
    }

    pub fn vacuum(&self) -> usize {
        0
    }

    /// Ordinal of an occupation vector, or `None` if it is outside the basis.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        if occ.len() != self.modes {
            return None;
        }
        let n: usize = occ.iter().map(|&x| x as usize).sum();
        if n > self.n_max {
            return None;
        }
        let mut rank = self.sector_offsets[n];
        let mut remaining = n;
        for (i, &s) in occ[..self.modes - 1].iter().enumerate() {
            let s = s as usize;
            let q = self.modes - i - 1;
            if remaining > s {
                // states with a larger occupation at mode i come first
                rank += self.binom[remaining - s - 1 + q][q];
            }
            remaining -= s;
        }
        Some(rank)
    }
}

fn push_sector(out: &mut Vec<u8>, scratch: &mut [u8], i: usize, remaining: usize) {
    if i + 1 == scratch.len() {
        scratch[i] = remaining as u8;
        out.extend_from_slice(scratch);
        return;
    }
    for v in (0..=remaining).rev() {
        scratch[i] = v as u8;
        push_sector(out, scratch, i + 1, remaining - v);
    }
    scratch[i] = 0;
}

/// Compressed-row complex matrix with sorted, duplicate-free columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Builds a matrix row by row. Entries are sorted, duplicates summed and
    /// exact zeros dropped.
    pub fn from_rows<F>(dim: usize, hermitian: bool, row: F) -> Self
    where
        F: Fn(usize) -> Vec<(usize, Complex64)> + Sync,
    {
        let rows: Vec<Vec<(usize, Complex64)>> = (0..dim)
            .into_par_iter()
            .map(|i| {
                let mut r = row(i);
                r.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(r.len());
                for (c, v) in r {
                    assert!(c < dim, "column {c} out of range for dimension {dim}");
                    match merged.last_mut() {
                        Some(last) if last.0 == c => last.1 += v,
                        _ => merged.push((c, v)),
                    }
                }
                merged.retain(|e| e.1 != C0);
                merged
            })
            .collect();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for r in rows {
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        SparseOperator {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian,
        }
    }

    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, Complex64)], hermitian: bool) -> Self {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for &(i, j, v) in triplets {
            rows[i].push((j, v));
        }
        Self::from_rows(dim, hermitian, |i| rows[i].clone())
    }

    pub fn from_dense(m: &DMatrix<Complex64>, hermitian: bool) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        Self::from_rows(m.nrows(), hermitian, |i| {
            (0..m.ncols()).map(|j| (j, m[(i, j)])).collect()
        })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self::from_rows(diag.len(), true, |i| vec![(i, Complex64::new(diag[i], 0.0))])
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Whether the construction guarantees H = H†.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => C0,
        }
    }

    /// y = A x.
    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.par_chunks_mut(1024).enumerate().for_each(|(chunk, out)| {
            let base = chunk * 1024;
            for (k, yi) in out.iter_mut().enumerate() {
                let i = base + k;
                let mut acc = C0;
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[p] * x[self.cols[p]];
                }
                *yi = acc;
            }
        });
    }

    /// Every stored entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    /// y = Re(A) x for real vectors; equals A x when [`Self::is_real`].
    pub fn matvec_real_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.par_chunks_mut(1024).enumerate().for_each(|(chunk, out)| {
            let base = chunk * 1024;
            for (k, yi) in out.iter_mut().enumerate() {
                let i = base + k;
                let mut acc = 0.0;
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[p].re * x[self.cols[p]];
                }
                *yi = acc;
            }
        });
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![C0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self::from_rows(self.dim, self.hermitian && other.hermitian, |i| {
            self.row(i).chain(other.row(i)).collect()
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        SparseOperator {
            vals: self.vals.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// A + c·1.
    pub fn shift(&self, c: f64) -> Self {
        self.add(&Self::identity(self.dim).scale(c))
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t: Vec<(usize, usize, Complex64)> = Vec::with_capacity(self.nnz());
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                t.push((j, i, v.conj()));
            }
        }
        Self::from_triplets(self.dim, &t, self.hermitian)
    }

    /// max |A_ij − conj(A_ji)| over stored entries and their mirrors.
    pub fn max_hermitian_defect(&self) -> f64 {
        (0..self.dim)
            .into_par_iter()
            .map(|i| {
                self.row(i)
                    .map(|(j, v)| (v - self.get(j, i).conj()).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, C0);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

fn check_modes(basis: &FockBasis, f: &OneParticleVector) -> Result<()> {
    if f.len() != basis.modes() {
        return Err(Error::InvalidArgument(format!(
            "one-particle vector has {} entries, basis has {} modes",
            f.len(),
            basis.modes()
        )));
    }
    Ok(())
}

/// a(f) = Σ_i conj(f_i) a_i.
pub fn annihilator(basis: &FockBasis, f: &OneParticleVector) -> Result<SparseOperator> {
    check_modes(basis, f)?;
    let f = f.as_slice();
    Ok(SparseOperator::from_rows(basis.dim(), false, |row| {
        let occ = basis.occupation(row);
        if basis.total(row) >= basis.max_particles() {
            return Vec::new();
        }
        let mut scratch = occ.to_vec();
        let mut out = Vec::new();
        for (i, fi) in f.iter().enumerate() {
            if *fi == C0 {
                continue;
            }
            scratch[i] += 1;
            let col = basis.index_of(&scratch).expect("raised state is in the basis");
            out.push((col, fi.conj() * (scratch[i] as f64).sqrt()));
            scratch[i] -= 1;
        }
        out
    }))
}

/// a*(f) = Σ_i f_i a_i†, compressed onto the truncated space.
pub fn creator(basis: &FockBasis, f: &OneParticleVector) -> Result<SparseOperator> {
    check_modes(basis, f)?;
    let f = f.as_slice();
    Ok(SparseOperator::from_rows(basis.dim(), false, |row| {
        let occ = basis.occupation(row);
        let mut scratch = occ.to_vec();
        let mut out = Vec::new();
        for (i, fi) in f.iter().enumerate() {
            if *fi == C0 || occ[i] == 0 {
                continue;
            }
            let n = occ[i] as f64;
            scratch[i] -= 1;
            let col = basis.index_of(&scratch).expect("lowered state is in the basis");
            out.push((col, fi * n.sqrt()));
            scratch[i] += 1;
        }
        out
    }))
}

/// dΓ(h) for diagonal h: entry Σ_i n_i·energies_i.
pub fn second_quantize_diagonal(basis: &FockBasis, energies: &[f64]) -> Result<SparseOperator> {
    if energies.len() != basis.modes() {
        return Err(Error::InvalidArgument(format!(
            "{} energies for {} modes",
            energies.len(),
            basis.modes()
        )));
    }
    let diag: Vec<f64> = (0..basis.dim())
        .map(|s| {
            basis
                .occupation(s)
                .iter()
                .zip(energies)
                .map(|(&n, e)| n as f64 * e)
                .sum()
        })
        .collect();
    Ok(SparseOperator::diagonal(&diag))
}

/// Total number operator.
pub fn number_operator(basis: &FockBasis) -> SparseOperator {
    let diag: Vec<f64> = (0..basis.dim()).map(|s| basis.total(s) as f64).collect();
    SparseOperator::diagonal(&diag)
}

/// Largest tensor order and dimension the dense symmetrizer accepts.
pub const MAX_TENSOR_ORDER: usize = 6;
pub const MAX_TENSOR_DIM: usize = 6;

fn check_vectors(vectors: &[Vec<Complex64>]) -> Result<usize> {
    let d = vectors
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidArgument("need at least one vector".into()))?;
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::InvalidArgument("vectors have different lengths".into()));
    }
    Ok(d)
}

/// Dense u₁ ⊗ … ⊗ uₙ, row-major in (i₁, …, iₙ).
pub fn tensor_product(vectors: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for v in vectors {
        out = out.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
    }
    out
}

/// v^{⊗n}.
pub fn tensor_power(v: &[Complex64], n: usize) -> Vec<Complex64> {
    tensor_product(&vec![v.to_vec(); n])
}

/// Average of a dense order-n tensor over all index permutations.
pub fn symmetrize_tensor(t: &[Complex64], d: usize, n: usize) -> Result<Vec<Complex64>> {
    if n > MAX_TENSOR_ORDER || d > MAX_TENSOR_DIM {
        return Err(Error::ResourceLimit(format!(
            "dense symmetrization limited to order {MAX_TENSOR_ORDER} and dimension {MAX_TENSOR_DIM}"
        )));
    }
    if t.len() != d.pow(n as u32) {
        return Err(Error::InvalidArgument("tensor length is not d^n".into()));
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let scale = 1.0 / perms.len() as f64;
    let mut out = vec![C0; t.len()];
    let mut idx = vec![0usize; n];
    for (flat, slot) in out.iter_mut().enumerate() {
        let mut rest = flat;
        for k in (0..n).rev() {
            idx[k] = rest % d;
            rest /= d;
        }
        let mut acc = C0;
        for p in &perms {
            let src = p.iter().fold(0usize, |a, &k| a * d + idx[k]);
            acc += t[src];
        }
        *slot = acc * scale;
    }
    Ok(out)
}

/// Sym(u₁ ⊗ … ⊗ uₙ) as a dense tensor.
pub fn symmetrize(vectors: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let d = check_vectors(vectors)?;
    let n = vectors.len();
    if n > MAX_TENSOR_ORDER || d > MAX_TENSOR_DIM {
        return Err(Error::ResourceLimit(format!(
            "dense symmetrization limited to order {MAX_TENSOR_ORDER} and dimension {MAX_TENSOR_DIM}"
        )));
    }
    symmetrize_tensor(&tensor_product(vectors), d, n)
}

/// Writes Sym(u₁ ⊗ … ⊗ uₙ) as Σ_j c_j v_j^{⊗n} with v_j = Σ_k (−1)^{j_k} u_k,
/// c_j = (−1)^{j₁+…+jₙ} / (2ⁿ n!), j ∈ {0,1}ⁿ.
pub fn polarization_decompose(vectors: &[Vec<Complex64>]) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let d = check_vectors(vectors)?;
    let n = vectors.len();
    if n >= usize::BITS as usize - 1 {
        return Err(Error::ResourceLimit(format!("{n} vectors give too many sign patterns")));
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let norm = 1.0 / (2f64.powi(n as i32) * factorial);
    Ok((0..1usize << n)
        .map(|j| {
            let mut v = vec![C0; d];
            for (k, u) in vectors.iter().enumerate() {
                let sign = if j >> k & 1 == 1 { -1.0 } else { 1.0 };
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi += sign * ui;
                }
            }
            let alpha = if j.count_ones() % 2 == 1 { -norm } else { norm };
            (Complex64::new(alpha, 0.0), v)
        })
        .collect())
}

/// Σ_j c_j v_j^{⊗n} for the pairs returned by [`polarization_decompose`].
pub fn reconstruct_from_powers(pairs: &[(Complex64, Vec<Complex64>)], n: usize) -> Vec<Complex64> {
    let Some((_, first)) = pairs.first() else {
        return Vec::new();
    };
    let mut out = vec![C0; first.len().pow(n as u32)];
    for (c, v) in pairs {
        for (o, t) in out.iter_mut().zip(tensor_power(v, n)) {
            *o += c * t;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn dimensions() {
        for (m, n) in [(1, 0), (1, 5), (3, 4), (5, 3), (32, 4)] {
            let b = FockBasis::new(m, n).unwrap();
            assert_eq!(b.dim(), binomial(m + n, n));
            for k in 0..=n {
                assert_eq!(b.sector(k).len(), binomial(m + k - 1, k));
            }
        }
        assert_eq!(FockBasis::new(32, 4).unwrap().dim(), 58_905);
    }

    #[test]
    fn index_round_trip() {
        let b = FockBasis::new(5, 4).unwrap();
        for s in 0..b.dim() {
            assert_eq!(b.index_of(b.occupation(s)), Some(s));
        }
        assert_eq!(b.index_of(&[5, 0, 0, 0, 0]), None);
        assert_eq!(b.occupation(0), &[0, 0, 0, 0, 0]);
        assert_eq!(b.occupation(1), &[1, 0, 0, 0, 0]);
        assert_eq!(b.occupation(b.sector(2).start), &[2, 0, 0, 0, 0]);
    }

    #[test]
    fn sectors_are_graded() {
        let b = FockBasis::new(4, 3).unwrap();
        for n in 0..=3 {
            for s in b.sector(n) {
                assert_eq!(b.total(s), n);
            }
            let states: Vec<&[u8]> = b.sector(n).map(|s| b.occupation(s)).collect();
            assert!(states.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn ladder_examples() {
        let b = FockBasis::new(3, 3).unwrap();
        let e1 = OneParticleVector::unit(3, 0);
        let a = annihilator(&b, &e1).unwrap();
        let mut x = vec![C0; b.dim()];
        x[b.index_of(&[1, 0, 0]).unwrap()] = c(1.0);
        let y = a.apply(&x);
        assert_eq!(y[0], c(1.0));
        assert!(y[1..].iter().all(|v| *v == C0));

        let f = OneParticleVector::new(vec![Complex64::new(0.3, 0.1), c(-0.2), Complex64::new(0.0, 1.5)]);
        let ad = creator(&b, &f).unwrap();
        let mut vac = vec![C0; b.dim()];
        vac[0] = c(1.0);
        let out = ad.apply(&vac);
        for i in 0..3 {
            let mut occ = [0u8; 3];
            occ[i] = 1;
            assert_eq!(out[b.index_of(&occ).unwrap()], f[i]);
        }
    }

    #[test]
    fn creator_is_adjoint_of_annihilator() {
        let b = FockBasis::new(4, 3).unwrap();
        let f = OneParticleVector::new(vec![
            Complex64::new(0.3, 0.1),
            c(-0.2),
            Complex64::new(0.0, 1.5),
            c(0.7),
        ]);
        assert_eq!(creator(&b, &f).unwrap(), annihilator(&b, &f).unwrap().conj_transpose());
        let top = b.sector(3);
        let ad = creator(&b, &f).unwrap();
        // nothing is created out of the top sector
        for row in 0..b.dim() {
            for (col, _) in ad.row(row) {
                assert!(!top.contains(&col));
            }
        }
    }

    #[test]
    fn length_mismatch() {
        let b = FockBasis::new(3, 2).unwrap();
        assert!(matches!(
            creator(&b, &OneParticleVector::zeros(2)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn second_quantized_diagonal() {
        let b = FockBasis::new(3, 3).unwrap();
        let h = [1.5, 2.0, 4.0];
        let d = second_quantize_diagonal(&b, &h).unwrap();
        assert_eq!(d.get(0, 0), C0);
        let s = b.index_of(&[0, 2, 0]).unwrap();
        assert_eq!(d.get(s, s), c(4.0));
        assert_eq!(d.max_hermitian_defect(), 0.0);
    }

    #[test]
    fn sparse_merge_and_audit() {
        let op = SparseOperator::from_triplets(
            2,
            &[(0, 1, c(1.0)), (0, 1, c(2.0)), (1, 0, c(3.0)), (1, 1, C0)],
            true,
        );
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(0, 1), c(3.0));
        assert_eq!(op.max_hermitian_defect(), 0.0);
        let bad = SparseOperator::from_triplets(2, &[(0, 1, c(1.0)), (1, 0, c(1.5))], true);
        assert_eq!(bad.max_hermitian_defect(), 0.5);
        assert_eq!(op.shift(2.0).get(1, 1), c(2.0));
    }

    #[test]
    fn polarization_small_orders() {
        let u = vec![Complex64::new(1.0, -2.0), c(0.5)];
        let pairs = polarization_decompose(std::slice::from_ref(&u)).unwrap();
        assert_eq!(pairs.len(), 2);
        let r = reconstruct_from_powers(&pairs, 1);
        assert_eq!(r, u);

        let u2 = vec![c(0.1), Complex64::new(0.0, 3.0)];
        let pairs = polarization_decompose(&[u.clone(), u2.clone()]).unwrap();
        let r = reconstruct_from_powers(&pairs, 2);
        let sym = symmetrize(&[u.clone(), u2.clone()]).unwrap();
        let hand: Vec<Complex64> = tensor_product(&[u.clone(), u2.clone()])
            .iter()
            .zip(tensor_product(&[u2, u]))
            .map(|(a, b)| (a + b) / 2.0)
            .collect();
        for ((a, b), h) in r.iter().zip(&sym).zip(&hand) {
            assert!((a - b).norm() < 1e-15);
            assert!((b - h).norm() < 1e-15);
        }
    }

    #[test]
    fn symmetrize_is_projection() {
        let u = vec![c(1.0), Complex64::new(0.5, 0.5), c(-2.0)];
        assert_eq!(symmetrize(std::slice::from_ref(&u)).unwrap(), u);
        let uu = tensor_power(&u, 2);
        let s = symmetrize(&[u.clone(), u.clone()]).unwrap();
        for (a, b) in uu.iter().zip(&s) {
            assert!((a - b).norm() < 1e-15);
        }
        let again = symmetrize_tensor(&s, 3, 2).unwrap();
        assert_eq!(again, s);
        assert!(matches!(symmetrize(&vec![u; 7]), Err(Error::ResourceLimit(_))));
    }
}
