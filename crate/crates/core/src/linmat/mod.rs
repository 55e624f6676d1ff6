//! Linear matroids over prime fields: rank oracles, Rado representations,
//! exact-weight independent sets and matroid intersection.

pub mod field;
pub mod intersection;
pub mod rado;
pub mod solve;
pub mod xwb;

pub use field::{is_prime, PrimeFieldMatrix};
pub use intersection::matroid_intersection;
pub use rado::{rado_independent, rado_representation};
pub use solve::solve_fcp_linear_matroid;
pub use xwb::{exact_weight_basis, has_exact_weight_basis, xwi, XwiQuery};

/// 2³¹ − 1.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// (rank, independent) of a column subset.
pub fn rank_and_independence(matrix: &PrimeFieldMatrix, subset: &[usize]) -> (usize, bool) {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let rank = matrix.rank_of_columns(subset);
    (rank, sorted.len() == subset.len() && rank == subset.len())
}
