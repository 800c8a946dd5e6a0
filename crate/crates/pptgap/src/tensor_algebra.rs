//! Dense operator algebra on bipartite spaces with equal local dimension.
//!
//! Matrices in `M_k ⊗ M_k` are identified with `M_{k²}` through the Kronecker
//! product, with the first tensor factor as the slow index. The structural
//! maps (flip, partial transpose, realignment) are implemented as explicit
//! index permutations so the three conventions agree by construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("local dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("entry count {got} does not match expected {expected}")]
    BadEntryCount { expected: usize, got: usize },
    #[error("local dimension must be at least 1")]
    ZeroDimension,
}

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Sign of the flip compression `(Id ± F) ρ (Id ± F)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// A complex matrix of order `k²` acting on `ℂ^k ⊗ ℂ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteMatrix {
    local_dim: usize,
    mat: DMatrix<C64>,
}

/// A complex matrix acting on a single factor. Usually square of order `k`;
/// rectangular shapes appear as local maps between different dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMatrix {
    mat: DMatrix<C64>,
}

/// An element of `ℂ^k ⊗ ℂ^k`, stored as a column of length `k²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteVector {
    local_dim: usize,
    vec: DVector<C64>,
}

impl BipartiteMatrix {
    pub fn from_fn(local_dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let n = local_dim * local_dim;
        Self {
            local_dim,
            mat: DMatrix::from_fn(n, n, f),
        }
    }

    /// Builds from a row-major entry list of length `k⁴`.
    pub fn from_entries(local_dim: usize, entries: Vec<C64>) -> Result<Self, TensorError> {
        if local_dim == 0 {
            return Err(TensorError::ZeroDimension);
        }
        let n = local_dim * local_dim;
        if entries.len() != n * n {
            return Err(TensorError::BadEntryCount {
                expected: n * n,
                got: entries.len(),
            });
        }
        Ok(Self {
            local_dim,
            mat: DMatrix::from_row_iterator(n, n, entries),
        })
    }

    pub fn zeros(local_dim: usize) -> Self {
        let n = local_dim * local_dim;
        Self {
            local_dim,
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(local_dim: usize) -> Self {
        let n = local_dim * local_dim;
        Self {
            local_dim,
            mat: DMatrix::identity(n, n),
        }
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Order of the underlying matrix, `k²`.
    pub fn order(&self) -> usize {
        self.local_dim * self.local_dim
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn from_matrix(local_dim: usize, mat: DMatrix<C64>) -> Result<Self, TensorError> {
        let n = local_dim * local_dim;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(TensorError::BadEntryCount {
                expected: n * n,
                got: mat.nrows() * mat.ncols(),
            });
        }
        Ok(Self { local_dim, mat })
    }

    /// Row-major entry list, the layout used by the file format.
    pub fn entries_row_major(&self) -> Vec<C64> {
        let n = self.order();
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                out.push(self.mat[(r, c)]);
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            local_dim: self.local_dim,
            mat: &self.mat * C64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        if self.local_dim != other.local_dim {
            return Err(TensorError::DimensionMismatch(self.local_dim, other.local_dim));
        }
        Ok(Self {
            local_dim: self.local_dim,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        if self.local_dim != other.local_dim {
            return Err(TensorError::DimensionMismatch(self.local_dim, other.local_dim));
        }
        Ok(Self {
            local_dim: self.local_dim,
            mat: &self.mat - &other.mat,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TensorError> {
        if self.local_dim != other.local_dim {
            return Err(TensorError::DimensionMismatch(self.local_dim, other.local_dim));
        }
        Ok(Self {
            local_dim: self.local_dim,
            mat: &self.mat * &other.mat,
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            local_dim: self.local_dim,
            mat: self.mat.adjoint(),
        }
    }

    /// Largest entrywise deviation from Hermitianity, `max |M - M*|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.order();
        let mut dev = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let d = (self.mat[(r, c)] - self.mat[(c, r)].conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Partial transpose on the second factor: `(A ⊗ B)^{t₂} = A ⊗ Bᵗ`.
    pub fn partial_transpose(&self) -> Self {
        let k = self.local_dim;
        Self::from_fn(k, |row, col| {
            let (a, p) = (row / k, row % k);
            let (b, q) = (col / k, col % k);
            self.mat[(a * k + q, b * k + p)]
        })
    }

    /// Realignment `R(Σ Aᵢ ⊗ Bᵢ) = Σ vec(Aᵢ) vec(Bᵢ)ᵗ`, as the entry
    /// permutation `R(C)[(a,b),(p,q)] = C[(a,p),(b,q)]`. An involution.
    pub fn realign(&self) -> Self {
        let k = self.local_dim;
        Self::from_fn(k, |row, col| {
            let (a, b) = (row / k, row % k);
            let (p, q) = (col / k, col % k);
            self.mat[(a * k + p, b * k + q)]
        })
    }

    /// `(Id ± F) ρ (Id ± F)`. The result is flip-invariant and PSD whenever
    /// `ρ` is.
    pub fn compress(&self, sign: Sign) -> Self {
        let k = self.local_dim;
        let f = flip_operator(k);
        let proj = match sign {
            Sign::Plus => &BipartiteMatrix::identity(k).mat + &f.mat,
            Sign::Minus => &BipartiteMatrix::identity(k).mat - &f.mat,
        };
        Self {
            local_dim: k,
            mat: &proj * &self.mat * &proj,
        }
    }

    /// Partial trace: `marginal(Σ Aᵢ ⊗ Bᵢ, A) = Σ Aᵢ tr(Bᵢ)` and symmetrically
    /// for side B. Preserves the trace.
    pub fn marginal(&self, side: Side) -> LocalMatrix {
        let k = self.local_dim;
        let mat = match side {
            Side::A => DMatrix::from_fn(k, k, |a, b| {
                (0..k).map(|p| self.mat[(a * k + p, b * k + p)]).sum()
            }),
            Side::B => DMatrix::from_fn(k, k, |p, q| {
                (0..k).map(|a| self.mat[(a * k + p, a * k + q)]).sum()
            }),
        };
        LocalMatrix { mat }
    }

    /// `(T ⊗ T) ρ (T* ⊗ T*)` for a local map `T` with `k` columns; the result
    /// lives in `M_m ⊗ M_m` where `m` is the row count of `T`.
    pub fn conjugate_local(&self, t: &LocalMatrix) -> Result<Self, TensorError> {
        if t.ncols() != self.local_dim {
            return Err(TensorError::DimensionMismatch(t.ncols(), self.local_dim));
        }
        let tt = kron_raw(&t.mat, &t.mat);
        let mat = &tt * &self.mat * tt.adjoint();
        Ok(Self {
            local_dim: t.nrows(),
            mat,
        })
    }

    /// `ρ + FρF`.
    pub fn plus_flip_conjugate(&self) -> Self {
        let f = flip_operator(self.local_dim);
        Self {
            local_dim: self.local_dim,
            mat: &self.mat + &f.mat * &self.mat * &f.mat,
        }
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, v: &BipartiteVector) -> Result<BipartiteVector, TensorError> {
        if v.local_dim != self.local_dim {
            return Err(TensorError::DimensionMismatch(self.local_dim, v.local_dim));
        }
        Ok(BipartiteVector {
            local_dim: self.local_dim,
            vec: &self.mat * &v.vec,
        })
    }
}

impl LocalMatrix {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        Self {
            mat: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Builds a square matrix from a row-major entry list of length `k²`.
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self, TensorError> {
        if entries.len() != dim * dim {
            return Err(TensorError::BadEntryCount {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self {
            mat: DMatrix::from_row_iterator(dim, dim, entries),
        })
    }

    /// Rectangular local map, row-major entries.
    pub fn from_shape(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self, TensorError> {
        if entries.len() != rows * cols {
            return Err(TensorError::BadEntryCount {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            mat: DMatrix::from_row_iterator(rows, cols, entries),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn nrows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.mat.ncols()
    }

    /// Dimension of a square local matrix.
    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.mat.nrows(), self.mat.ncols());
        self.mat.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn from_matrix(mat: DMatrix<C64>) -> Self {
        Self { mat }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn transpose(&self) -> Self {
        Self {
            mat: self.mat.transpose(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for r in 0..self.mat.nrows() {
            for c in r..self.mat.ncols() {
                let d = (self.mat[(r, c)] - self.mat[(c, r)].conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Row-major flattening: `vec(a bᵗ) = a ⊗ b`.
    pub fn vec(&self) -> BipartiteVector {
        let k = self.dim();
        BipartiteVector {
            local_dim: k,
            vec: DVector::from_fn(k * k, |idx, _| self.mat[(idx / k, idx % k)]),
        }
    }
}

impl BipartiteVector {
    pub fn from_entries(local_dim: usize, entries: Vec<C64>) -> Result<Self, TensorError> {
        if entries.len() != local_dim * local_dim {
            return Err(TensorError::BadEntryCount {
                expected: local_dim * local_dim,
                got: entries.len(),
            });
        }
        Ok(Self {
            local_dim,
            vec: DVector::from_vec(entries),
        })
    }

    pub fn zeros(local_dim: usize) -> Self {
        Self {
            local_dim,
            vec: DVector::zeros(local_dim * local_dim),
        }
    }

    /// `v ⊗ w` with `(v ⊗ w)[i·k + j] = vᵢ wⱼ`.
    pub fn product(v: &[C64], w: &[C64]) -> Result<Self, TensorError> {
        if v.len() != w.len() {
            return Err(TensorError::DimensionMismatch(v.len(), w.len()));
        }
        let k = v.len();
        Ok(Self {
            local_dim: k,
            vec: DVector::from_fn(k * k, |idx, _| v[idx / k] * w[idx % k]),
        })
    }

    /// `Σ eᵢ ⊗ eᵢ`, the unnormalized maximally entangled vector.
    pub fn max_entangled(local_dim: usize) -> Self {
        let k = local_dim;
        Self {
            local_dim,
            vec: DVector::from_fn(k * k, |idx, _| {
                if idx / k == idx % k {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn len(&self) -> usize {
        self.vec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vec.len() == 0
    }

    pub fn entry(&self, idx: usize) -> C64 {
        self.vec[idx]
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.vec
    }

    /// Inverse of [`LocalMatrix::vec`].
    pub fn unvec(&self) -> LocalMatrix {
        let k = self.local_dim;
        LocalMatrix::from_fn(k, |r, c| self.vec[r * k + c])
    }

    /// Applies the flip as the index swap `x[(i,j)] ↦ x[(j,i)]`.
    pub fn flip(&self) -> Self {
        let k = self.local_dim;
        Self {
            local_dim: k,
            vec: DVector::from_fn(k * k, |idx, _| self.vec[(idx % k) * k + idx / k]),
        }
    }

    /// Rank-one outer product `x ȳᵗ` as a bipartite matrix.
    pub fn outer(&self, other: &Self) -> Result<BipartiteMatrix, TensorError> {
        if self.local_dim != other.local_dim {
            return Err(TensorError::DimensionMismatch(self.local_dim, other.local_dim));
        }
        let n = self.vec.len();
        Ok(BipartiteMatrix {
            local_dim: self.local_dim,
            mat: DMatrix::from_fn(n, n, |r, c| self.vec[r] * other.vec[c].conj()),
        })
    }

    /// Plain (non-conjugating) outer product `x yᵗ`.
    pub fn outer_t(&self, other: &Self) -> Result<BipartiteMatrix, TensorError> {
        if self.local_dim != other.local_dim {
            return Err(TensorError::DimensionMismatch(self.local_dim, other.local_dim));
        }
        let n = self.vec.len();
        Ok(BipartiteMatrix {
            local_dim: self.local_dim,
            mat: DMatrix::from_fn(n, n, |r, c| self.vec[r] * other.vec[c]),
        })
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }
}

fn kron_raw(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    DMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Kronecker product of two local matrices of equal dimension.
pub fn kron(a: &LocalMatrix, b: &LocalMatrix) -> Result<BipartiteMatrix, TensorError> {
    if a.dim() != b.dim() {
        return Err(TensorError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(BipartiteMatrix {
        local_dim: a.dim(),
        mat: kron_raw(&a.mat, &b.mat),
    })
}

/// The flip operator `F = Σ eᵢeⱼᵗ ⊗ eⱼeᵢᵗ`, satisfying `F(a ⊗ b) = b ⊗ a`.
pub fn flip_operator(local_dim: usize) -> BipartiteMatrix {
    let k = local_dim;
    BipartiteMatrix::from_fn(k, |row, col| {
        let (a, p) = (row / k, row % k);
        let (b, q) = (col / k, col % k);
        if a == q && p == b {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `u uᵗ` for `u = Σ eᵢ ⊗ eᵢ`; equals both `R(Id)` and `F^{t₂}`.
pub fn max_entangled_projector(local_dim: usize) -> BipartiteMatrix {
    let u = BipartiteVector::max_entangled(local_dim);
    u.outer(&u).expect("same dimension")
}

pub fn max_abs_diff(a: &BipartiteMatrix, b: &BipartiteMatrix) -> f64 {
    assert_eq!(a.local_dim, b.local_dim);
    let n = a.order();
    let mut dev = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let d = (a.mat[(r, c)] - b.mat[(r, c)]).norm();
            if d > dev {
                dev = d;
            }
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn basis(k: usize, i: usize) -> Vec<C64> {
        (0..k).map(|j| c(if j == i { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    // Deterministic pseudo-random complex entries, enough for algebra checks.
    fn scramble(seed: u64, n: usize) -> Vec<C64> {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        (0..n).map(|_| c(next(), next())).collect()
    }

    fn random_local(k: usize, seed: u64) -> LocalMatrix {
        LocalMatrix::from_entries(k, scramble(seed, k * k)).unwrap()
    }

    fn random_bipartite(k: usize, seed: u64) -> BipartiteMatrix {
        BipartiteMatrix::from_entries(k, scramble(seed, k * k * k * k)).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let id2 = LocalMatrix::identity(2);
        let out = kron(&id2, &id2).unwrap();
        assert_eq!(max_abs_diff(&out, &BipartiteMatrix::identity(2)), 0.0);
    }

    #[test]
    fn kron_places_elementary_blocks() {
        // e1e1^t ⊗ e2e2^t has its single 1 at row/col 1 (0-based), k = 2
        let e11 = LocalMatrix::from_entries(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e22 = LocalMatrix::from_entries(2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let out = kron(&e11, &e22).unwrap();
        for r in 0..4 {
            for c_ in 0..4 {
                let expect = if r == 1 && c_ == 1 { 1.0 } else { 0.0 };
                assert_eq!(out.entry(r, c_), c(expect, 0.0));
            }
        }
    }

    #[test]
    fn kron_outer_product_identity() {
        // (v ⊗ w)(r ⊗ s)^t = v r^t ⊗ w s^t for random complex factors in C^3
        let vs = scramble(1, 3);
        let ws = scramble(2, 3);
        let rs = scramble(3, 3);
        let ss = scramble(4, 3);
        let vw = BipartiteVector::product(&vs, &ws).unwrap();
        let rs_t = BipartiteVector::product(&rs, &ss).unwrap();
        let lhs = vw.outer_t(&rs_t).unwrap();
        let vr = LocalMatrix::from_fn(3, |i, j| vs[i] * rs[j]);
        let ws_m = LocalMatrix::from_fn(3, |i, j| ws[i] * ss[j]);
        let rhs = kron(&vr, &ws_m).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn kron_mixed_product() {
        let a = random_local(3, 10);
        let b = random_local(3, 11);
        let c_ = random_local(3, 12);
        let d = random_local(3, 13);
        let lhs = kron(&a, &b).unwrap().mul(&kron(&c_, &d).unwrap()).unwrap();
        let ac = LocalMatrix::from_matrix(a.as_matrix() * c_.as_matrix());
        let bd = LocalMatrix::from_matrix(b.as_matrix() * d.as_matrix());
        let rhs = kron(&ac, &bd).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn flip_swaps_product_vectors() {
        let f = flip_operator(2);
        let e1 = basis(2, 0);
        let e2 = basis(2, 1);
        let v = BipartiteVector::product(&e1, &e2).unwrap();
        let swapped = f.apply(&v).unwrap();
        let expect = BipartiteVector::product(&e2, &e1).unwrap();
        assert_eq!(swapped, expect);
    }

    #[test]
    fn flip_is_an_involution() {
        for k in 2..=5 {
            let f = flip_operator(k);
            let sq = f.mul(&f).unwrap();
            assert_eq!(max_abs_diff(&sq, &BipartiteMatrix::identity(k)), 0.0);
        }
    }

    #[test]
    fn flip_spectrum_splits_by_symmetry() {
        // F is real symmetric with eigenvalues ±1 of multiplicities
        // k(k+1)/2 and k(k-1)/2.
        for k in [3usize, 4] {
            let f = flip_operator(k);
            assert_eq!(f.hermitian_deviation(), 0.0);
            let eig = f.as_matrix().clone().symmetric_eigenvalues();
            let plus = eig.iter().filter(|l| **l > 0.5).count();
            let minus = eig.iter().filter(|l| **l < -0.5).count();
            assert_eq!(plus, k * (k + 1) / 2);
            assert_eq!(minus, k * (k - 1) / 2);
            assert!(eig.iter().all(|l| (l.abs() - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn partial_transpose_on_product_terms() {
        let a = random_local(3, 20);
        let b = random_local(3, 21);
        let lhs = kron(&a, &b).unwrap().partial_transpose();
        let rhs = kron(&a, &b.transpose()).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn partial_transpose_exchanges_flip_and_max_entangled() {
        for k in 2..=5 {
            let f = flip_operator(k);
            let uu = max_entangled_projector(k);
            assert_eq!(max_abs_diff(&f.partial_transpose(), &uu), 0.0);
            assert_eq!(max_abs_diff(&uu.partial_transpose(), &f), 0.0);
        }
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let rho = random_bipartite(3, 30);
        assert_eq!(max_abs_diff(&rho.partial_transpose().partial_transpose(), &rho), 0.0);
    }

    #[test]
    fn realign_exchanges_identity_and_max_entangled() {
        for k in 2..=5 {
            let id = BipartiteMatrix::identity(k);
            let uu = max_entangled_projector(k);
            assert_eq!(max_abs_diff(&id.realign(), &uu), 0.0);
            assert_eq!(max_abs_diff(&uu.realign(), &id), 0.0);
        }
    }

    #[test]
    fn realign_on_elementary_products() {
        // R(ab^t ⊗ cd^t) = (a⊗b)(c⊗d)^t
        let a = scramble(40, 3);
        let b = scramble(41, 3);
        let cc = scramble(42, 3);
        let d = scramble(43, 3);
        let ab = LocalMatrix::from_fn(3, |i, j| a[i] * b[j]);
        let cd = LocalMatrix::from_fn(3, |i, j| cc[i] * d[j]);
        let lhs = kron(&ab, &cd).unwrap().realign();
        let rhs = BipartiteVector::product(&a, &b)
            .unwrap()
            .outer_t(&BipartiteVector::product(&cc, &d).unwrap())
            .unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    // Independent oracle: realignment written as a permutation of flat
    // entry indices rather than of (row, col) pairs.
    fn realign_flat_oracle(m: &BipartiteMatrix) -> BipartiteMatrix {
        let k = m.local_dim();
        let n = k * k;
        let flat = m.entries_row_major();
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for a in 0..k {
            for p in 0..k {
                for b in 0..k {
                    for q in 0..k {
                        // source entry C[(a,p),(b,q)] lands at R(C)[(a,b),(p,q)]
                        let src = (a * k + p) * n + (b * k + q);
                        let dst = (a * k + b) * n + (p * k + q);
                        out[dst] = flat[src];
                    }
                }
            }
        }
        BipartiteMatrix::from_entries(k, out).unwrap()
    }

    #[test]
    fn realign_is_an_involution_against_flat_oracle() {
        let c_ = random_bipartite(3, 50);
        let once = c_.realign();
        assert_eq!(max_abs_diff(&once, &realign_flat_oracle(&c_)), 0.0);
        assert_eq!(max_abs_diff(&once.realign(), &c_), 0.0);
    }

    #[test]
    fn realignment_exchange_identities() {
        // On random C: (2) R(CF)F = C^{t2}; (3) R(CF) = R(C)^{t2};
        // (4) R(C^{t2}) = R(C)F; (5) R(C^{t2}) = (CF)^{t2}.
        let k = 3;
        let f = flip_operator(k);
        let c_ = random_bipartite(k, 60);
        let cf = c_.mul(&f).unwrap();
        let tol = 1e-10;
        assert!(max_abs_diff(&cf.realign().mul(&f).unwrap(), &c_.partial_transpose()) < tol);
        assert!(max_abs_diff(&cf.realign(), &c_.realign().partial_transpose()) < tol);
        assert!(max_abs_diff(&c_.partial_transpose().realign(), &c_.realign().mul(&f).unwrap()) < tol);
        assert!(max_abs_diff(&c_.partial_transpose().realign(), &cf.partial_transpose()) < tol);
    }

    #[test]
    fn vec_of_basis_product() {
        let e1 = basis(2, 0);
        let e2 = basis(2, 1);
        let m = LocalMatrix::from_fn(2, |i, j| e1[i] * e2[j]);
        assert_eq!(m.vec(), BipartiteVector::product(&e1, &e2).unwrap());
    }

    #[test]
    fn vec_of_skew_symmetric_is_skew_tensor() {
        let h = LocalMatrix::from_fn(3, |i, j| {
            let entries = scramble(70, 9);
            entries[i * 3 + j] - entries[j * 3 + i]
        });
        let v = h.vec();
        let fv = v.flip();
        for idx in 0..9 {
            assert!((v.entry(idx) + fv.entry(idx)).norm() < 1e-12);
        }
    }

    #[test]
    fn unvec_inverts_vec() {
        let a = random_local(4, 80);
        let back = a.vec().unvec();
        assert_eq!(a, back);
    }

    #[test]
    fn marginal_of_product_state() {
        let a = random_local(3, 90);
        let b = random_local(3, 91);
        let m = kron(&a, &b).unwrap().marginal(Side::A);
        let tr_b = b.trace();
        for r in 0..3 {
            for c_ in 0..3 {
                assert!((m.entry(r, c_) - a.entry(r, c_) * tr_b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn flip_conjugation_swaps_marginals() {
        let raw = random_bipartite(3, 100);
        let rho = BipartiteMatrix::from_matrix(3, (raw.as_matrix() + raw.as_matrix().adjoint()) * C64::new(0.5, 0.0)).unwrap();
        let f = flip_operator(3);
        let frf = f.mul(&rho).unwrap().mul(&f).unwrap();
        let lhs = frf.marginal(Side::A);
        let rhs = rho.marginal(Side::B);
        for r in 0..3 {
            for c_ in 0..3 {
                assert!((lhs.entry(r, c_) - rhs.entry(r, c_)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn marginal_of_max_entangled_is_identity() {
        let uu = max_entangled_projector(4);
        let m = uu.marginal(Side::A);
        for r in 0..4 {
            for c_ in 0..4 {
                let expect = if r == c_ { 1.0 } else { 0.0 };
                assert!((m.entry(r, c_) - c(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn marginal_preserves_trace() {
        let rho = random_bipartite(3, 110);
        let t = rho.trace();
        let ta = rho.marginal(Side::A).trace();
        let tb = rho.marginal(Side::B).trace();
        assert!((t - ta).norm() < 1e-12 * t.norm().max(1.0));
        assert!((t - tb).norm() < 1e-12 * t.norm().max(1.0));
    }

    #[test]
    fn compress_identity() {
        let out = BipartiteMatrix::identity(3).compress(Sign::Plus);
        let expect = BipartiteMatrix::identity(3)
            .add(&flip_operator(3))
            .unwrap()
            .scale(2.0);
        assert!(max_abs_diff(&out, &expect) < 1e-12);
    }

    #[test]
    fn compress_halves_sum_to_doubled_flip_average() {
        let rho = random_bipartite(3, 120);
        let lhs = rho.compress(Sign::Plus).add(&rho.compress(Sign::Minus)).unwrap();
        let rhs = rho.plus_flip_conjugate().scale(2.0);
        assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn compress_fixes_symmetric_rank_one() {
        // w = e1⊗e1 is flip-fixed, so (Id+F) w w̄^t (Id+F) = 4 w w̄^t
        let e1 = basis(3, 0);
        let w = BipartiteVector::product(&e1, &e1).unwrap();
        let ww = w.outer(&w).unwrap();
        assert!(max_abs_diff(&ww.compress(Sign::Plus), &ww.scale(4.0)) < 1e-12);
    }

    #[test]
    fn compress_products_annihilate() {
        let rho = random_bipartite(3, 130);
        let prod = rho.compress(Sign::Plus).mul(&rho.compress(Sign::Minus)).unwrap();
        assert!(prod.max_abs() < 1e-9);
    }

    #[test]
    fn conjugate_local_with_identity() {
        let rho = random_bipartite(3, 140);
        let out = rho.conjugate_local(&LocalMatrix::identity(3)).unwrap();
        assert!(max_abs_diff(&out, &rho) < 1e-12);
    }

    #[test]
    fn conjugate_local_maps_symmetric_sum_to_max_entangled() {
        // T s_i = e_i sends Σ s_i ⊗ s_i to u = Σ e_i ⊗ e_i.
        let k = 3;
        let s: Vec<Vec<C64>> = (0..k).map(|i| scramble(150 + i as u64, k)).collect();
        let mut w = BipartiteVector::zeros(k);
        for si in &s {
            let t = BipartiteVector::product(si, si).unwrap();
            w = BipartiteVector::from_entries(k, (0..k * k).map(|j| w.entry(j) + t.entry(j)).collect()).unwrap();
        }
        // T = S^{-1} where S has columns s_i
        let s_mat = DMatrix::from_fn(k, k, |r, c| s[c][r]);
        let t = LocalMatrix::from_matrix(s_mat.try_inverse().expect("independent"));
        let tt_w = {
            let ww = w.outer(&w).unwrap();
            ww.conjugate_local(&t).unwrap()
        };
        let u = BipartiteVector::max_entangled(k);
        let uu = u.outer(&u).unwrap();
        assert!(max_abs_diff(&tt_w, &uu) < 1e-8);
    }

    #[test]
    fn conjugate_local_preserves_psd() {
        // 50 random Gram states pushed through random local maps stay PSD
        for case in 0..50u64 {
            let k = 3;
            let m = 2 + (case % 2) as usize;
            let g = DMatrix::from_fn(k * k, k * k, |r, c_| {
                let vals = scramble(500 + case, k * k * k * k * 2);
                vals[r * k * k + c_]
            });
            let rho = BipartiteMatrix::from_matrix(k, &g * g.adjoint()).unwrap();
            let t = LocalMatrix::from_shape(m, k, scramble(900 + case, m * k)).unwrap();
            let out = rho.conjugate_local(&t).unwrap();
            assert_eq!(out.local_dim(), m);
            let min_eig = out
                .as_matrix()
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let scale = out.max_abs().max(1.0);
            assert!(min_eig >= -1e-10 * scale, "case {case}: min eigenvalue {min_eig}");
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = LocalMatrix::identity(2);
        let b = LocalMatrix::identity(3);
        assert_eq!(kron(&a, &b).unwrap_err(), TensorError::DimensionMismatch(2, 3));
        let rho = BipartiteMatrix::identity(2);
        assert!(rho.conjugate_local(&b).is_err());
    }

    #[test]
    fn entry_count_is_checked() {
        assert!(matches!(
            BipartiteMatrix::from_entries(2, vec![C64::new(1.0, 0.0); 15]),
            Err(TensorError::BadEntryCount { expected: 16, got: 15 })
        ));
    }
}
