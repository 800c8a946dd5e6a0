//! Exact verification of the symmetric/skew-symmetric dimension bounds for
//! subspaces of `W ⊗ W` generated by rank-1 tensors.
//!
//! All arithmetic here is over ℚ(i), so dimensions are exact integers and the
//! sharp example family is reproduced with zero tolerance. Generator lists
//! are flip-closed internally before any audit, so callers may pass unclosed
//! sets.

mod gaussian;

pub use gaussian::{GaussianRational, ScalarError};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SubspaceError {
    #[error("generating set must be nonempty")]
    EmptyGeneratingSet,
    #[error("generator {index} has a zero factor; tensor rank must be 1")]
    ZeroFactor { index: usize },
    #[error("generator {index} has length {got}, ambient dimension is {expected}")]
    FactorLength { index: usize, expected: usize, got: usize },
    #[error("ambient dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },
}

/// A rank-1 tensor `v ⊗ w` over ℚ(i), stored through its two factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTensor {
    left: Vec<GaussianRational>,
    right: Vec<GaussianRational>,
}

impl ExactTensor {
    pub fn new(left: Vec<GaussianRational>, right: Vec<GaussianRational>) -> Self {
        Self { left, right }
    }

    /// Product tensor from small integer coordinates.
    pub fn from_integers(left: &[i64], right: &[i64]) -> Self {
        Self {
            left: left.iter().copied().map(GaussianRational::from_integer).collect(),
            right: right.iter().copied().map(GaussianRational::from_integer).collect(),
        }
    }

    pub fn left(&self) -> &[GaussianRational] {
        &self.left
    }

    pub fn right(&self) -> &[GaussianRational] {
        &self.right
    }

    pub fn ambient_dim(&self) -> usize {
        self.left.len()
    }

    /// `F(v ⊗ w) = w ⊗ v`, again of tensor rank 1.
    pub fn flip(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    fn has_zero_factor(&self) -> bool {
        self.left.iter().all(GaussianRational::is_zero)
            || self.right.iter().all(GaussianRational::is_zero)
    }

    /// Coordinates in `W ⊗ W`, row-major: entry `i·k + j` is `vᵢ wⱼ`.
    pub fn tensor_coordinates(&self) -> Vec<GaussianRational> {
        let k = self.left.len();
        let mut out = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                out.push(&self.left[i] * &self.right[j]);
            }
        }
        out
    }
}

/// A list of rank-1 generators spanning a subspace of `W ⊗ W`, `W = ℚ(i)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingSet {
    ambient_dim: usize,
    generators: Vec<ExactTensor>,
}

impl GeneratingSet {
    pub fn new(ambient_dim: usize, generators: Vec<ExactTensor>) -> Result<Self, SubspaceError> {
        if generators.is_empty() {
            return Err(SubspaceError::EmptyGeneratingSet);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.left.len() != ambient_dim || g.right.len() != ambient_dim {
                return Err(SubspaceError::FactorLength {
                    index,
                    expected: ambient_dim,
                    got: g.left.len().max(g.right.len()),
                });
            }
            if g.has_zero_factor() {
                return Err(SubspaceError::ZeroFactor { index });
            }
        }
        Ok(Self { ambient_dim, generators })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[ExactTensor] {
        &self.generators
    }

    /// `G ∪ F(G)`, making the spanned subspace flip-invariant.
    pub fn flip_closure(&self) -> Vec<ExactTensor> {
        let mut out = self.generators.clone();
        for g in &self.generators {
            out.push(g.flip());
        }
        out
    }
}

/// Incremental row-echelon basis over ℚ(i): rows are reduced on insert and
/// only span-increasing rows are kept.
pub(crate) struct EchelonBasis {
    rows: Vec<Vec<GaussianRational>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self { rows: Vec::new(), pivots: Vec::new() }
    }

    /// Inserts a vector; returns true when it enlarged the span.
    pub fn insert(&mut self, mut row: Vec<GaussianRational>) -> bool {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if !row[p].is_zero() {
                let factor = &row[p] / &r[p];
                for (x, y) in row.iter_mut().zip(r.iter()) {
                    *x = &*x - &(&factor * y);
                }
            }
        }
        match row.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push(row);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Dimension of the span of exact vectors, by Gaussian elimination.
pub fn span_dim(vectors: &[Vec<GaussianRational>]) -> usize {
    let mut basis = EchelonBasis::new();
    for v in vectors {
        basis.insert(v.clone());
    }
    basis.rank()
}

/// Exact dimensions `(dim V, dim Sym(V), dim Skew-Sym(V))` for the subspace
/// spanned by the flip-closure of `G`.
///
/// The eigenspace dimensions come from eliminating `{g + F(g)}` and
/// `{g − F(g)}` over all generators g, which spans `Sym(V)` and
/// `Skew-Sym(V)` because the closure makes `V` flip-invariant and the
/// characteristic is not 2.
pub fn sym_skew_dims(set: &GeneratingSet) -> (usize, usize, usize) {
    let closure = set.flip_closure();
    let mut sym = EchelonBasis::new();
    let mut skew = EchelonBasis::new();
    for g in &closure {
        let t = g.tensor_coordinates();
        let ft = g.flip().tensor_coordinates();
        let plus: Vec<GaussianRational> = t.iter().zip(&ft).map(|(a, b)| a + b).collect();
        let minus: Vec<GaussianRational> = t.iter().zip(&ft).map(|(a, b)| a - b).collect();
        sym.insert(plus);
        skew.insert(minus);
    }
    let (ds, dk) = (sym.rank(), skew.rank());
    (ds + dk, ds, dk)
}

/// Dimension of the smallest `W` with `span(G ∪ F(G)) ⊆ W ⊗ W`. For
/// flip-closed rank-1 generating sets this is the span of the left factors.
pub fn minimal_local_space(set: &GeneratingSet) -> usize {
    let closure = set.flip_closure();
    let mut basis = EchelonBasis::new();
    for g in &closure {
        basis.insert(g.left.clone());
    }
    basis.rank()
}

/// Outcome of auditing one generating set against the dimension bounds.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AuditReport {
    pub dim_v: usize,
    pub dim_sym: usize,
    pub dim_skew: usize,
    /// Dimension of the minimal local space.
    pub n: usize,
    /// `n·dim_sym ≥ 2·dim_skew`.
    pub skew_bound_holds: bool,
    /// `2·dim_sym ≥ n`.
    pub local_bound_holds: bool,
    /// Equality `dim_sym = n/2` fired.
    pub equality_case_a: bool,
    /// When case (a) fires, `dim_skew = dim_sym` must follow.
    pub case_a_diagnostic_ok: bool,
    /// Equality `dim_sym = (2/n)·dim_skew` fired.
    pub equality_case_b: bool,
    /// When case (b) fires, `dim_sym = n−1` and `dim_skew = n(n−1)/2`
    /// must follow.
    pub case_b_diagnostic_ok: bool,
}

impl AuditReport {
    /// True when both inequalities hold and every fired equality case
    /// carries its required diagnostics.
    pub fn all_consistent(&self) -> bool {
        self.skew_bound_holds
            && self.local_bound_holds
            && self.case_a_diagnostic_ok
            && self.case_b_diagnostic_ok
    }
}

/// Audits `dim Sym(V) ≥ max{(2/n)·dim Skew-Sym(V), n/2}` for the span of the
/// flip-closure of `G`, together with the equality-case diagnostics.
/// Comparisons are in integer arithmetic.
pub fn inequality_audit(set: &GeneratingSet) -> AuditReport {
    let (dim_v, dim_sym, dim_skew) = sym_skew_dims(set);
    let n = minimal_local_space(set);
    let skew_bound_holds = n * dim_sym >= 2 * dim_skew;
    let local_bound_holds = 2 * dim_sym >= n;
    let equality_case_a = 2 * dim_sym == n;
    let case_a_diagnostic_ok = !equality_case_a || dim_skew == dim_sym;
    let equality_case_b = n * dim_sym == 2 * dim_skew;
    let case_b_diagnostic_ok =
        !equality_case_b || (dim_sym + 1 == n && 2 * dim_skew == n * (n - 1));
    AuditReport {
        dim_v,
        dim_sym,
        dim_skew,
        n,
        skew_bound_holds,
        local_bound_holds,
        equality_case_a,
        case_a_diagnostic_ok,
        equality_case_b,
        case_b_diagnostic_ok,
    }
}

/// The sharp family `V_k`: generators `a_i = e_i ⊗ (e₁ + 2e₂ + … + 2e_{i−1} + e_i)`
/// with their flips, plus for every level `n = 2..k` the rank-1 tensors
/// `r_i = (e₁ + 2e₂ + … + 2e_{i−1} + e_i + … + e_n) ⊗ (e_i + … + e_n)`.
/// The spanned subspace attains `dim Sym = k−1`, `dim Skew = k(k−1)/2`.
pub fn build_sharp_family(k: usize) -> Result<GeneratingSet, SubspaceError> {
    if k < 2 {
        return Err(SubspaceError::DimensionTooSmall { min: 2, got: k });
    }
    let mut gens = Vec::new();
    // 1-based coordinate helpers, emitted as 0-based integer vectors.
    let a_right = |i: usize| -> Vec<i64> {
        (1..=k)
            .map(|j| {
                if j == 1 || j == i {
                    1
                } else if j < i {
                    2
                } else {
                    0
                }
            })
            .collect()
    };
    let e = |i: usize| -> Vec<i64> { (1..=k).map(|j| i64::from(j == i)).collect() };
    for i in 2..=k {
        let a_i = ExactTensor::from_integers(&e(i), &a_right(i));
        gens.push(a_i.flip());
        gens.push(a_i);
    }
    for n in 2..=k {
        for i in 2..=n {
            let left: Vec<i64> = (1..=k)
                .map(|j| {
                    if j == 1 {
                        1
                    } else if j < i {
                        2
                    } else if j <= n {
                        1
                    } else {
                        0
                    }
                })
                .collect();
            let right: Vec<i64> = (1..=k).map(|j| i64::from(j >= i && j <= n)).collect();
            gens.push(ExactTensor::from_integers(&left, &right));
        }
    }
    GeneratingSet::new(k, gens)
}

/// Greedy extraction of a rank-1 basis of the span of the flip-closure,
/// by exact elimination over the tensor coordinates.
pub fn rank_one_basis(set: &GeneratingSet) -> Vec<ExactTensor> {
    let mut basis = EchelonBasis::new();
    let mut out = Vec::new();
    for g in set.flip_closure() {
        if basis.insert(g.tensor_coordinates()) {
            out.push(g);
        }
    }
    out
}
