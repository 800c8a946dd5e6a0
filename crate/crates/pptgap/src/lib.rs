//! Bipartite entanglement criteria built around the flip operator.
//!
//! The crate provides four layers:
//!
//! * [`tensor_algebra`] — dense operators on `M_k ⊗ M_k`: Kronecker products,
//!   flip, partial transpose, realignment, marginals and the flip
//!   compressions `(Id ± F) ρ (Id ± F)`.
//! * [`exact_subspace`] — exact (ℚ(i)) verification of the dimension bounds
//!   for subspaces generated by rank-1 tensors, including the sharp family.
//! * [`criteria`] and [`constructions`] — floating-point verdicts
//!   (PSD/PPT/SPC, numeric ranks, the rank inequality and its gap region)
//!   and the deterministic state generators that feed them.
//! * [`search`] and [`cli_io`] — the seeded hunt for PPT states inside the
//!   gap region, plus file formats and verification suites for the `pptgap`
//!   binary.

pub mod cli_io;
pub mod constructions;
pub mod criteria;
pub mod exact_subspace;
pub mod search;
pub mod tensor_algebra;

pub use criteria::{analyze, CriteriaReport, Tolerance};
pub use tensor_algebra::{BipartiteMatrix, BipartiteVector, LocalMatrix, Side, Sign};
