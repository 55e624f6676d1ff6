//! Random linear representations of Rado matroids.
//!
//! Given a family 𝓗 over 𝓤 and a linear matroid M on 𝓗, the Rado matroid on
//! 𝓤 has as independent sets the systems of distinct representatives of
//! M-independent subfamilies.

use rand::Rng;

use super::field::{add_mod, mul_mod, PrimeFieldMatrix};
use crate::error::{Error, Result};
use crate::seed;

/// Column u is Σ_{H ∋ u} x_{H,u}·col(H) with x_{H,u} uniform in F_p \ {0}.
///
/// Represents the Rado matroid with probability at least 1 − n·rank(M)/p.
pub fn rado_representation(
    n_universe: usize,
    family: &[Vec<usize>],
    matrix: &PrimeFieldMatrix,
    seed: u64,
) -> Result<PrimeFieldMatrix> {
    if family.len() != matrix.cols() {
        return Err(Error::Shape(format!(
            "{} sets but the matroid has {} columns",
            family.len(),
            matrix.cols()
        )));
    }
    let p = matrix.prime();
    let rank = matrix.rank() as u64;
    let needed = (n_universe as u64).saturating_mul(rank);
    if needed >= p {
        return Err(Error::PrimeTooSmall { prime: p, needed });
    }
    let rows = matrix.rows();
    let mut cols = vec![vec![0u64; rows]; n_universe];
    let mut rng = seed::rng(seed, &[0x7ad0]);
    for (h, set) in family.iter().enumerate() {
        for &u in set {
            if u >= n_universe {
                return Err(Error::Shape(format!(
                    "set {h} references unknown element {u}"
                )));
            }
            let x = rng.gen_range(1..p);
            for (i, c) in cols[u].iter_mut().enumerate() {
                *c = add_mod(*c, mul_mod(x, matrix.get(i, h), p), p);
            }
        }
    }
    PrimeFieldMatrix::from_columns(p, rows, &cols)
}

/// Definitional check: `subset` can be matched to distinct sets containing
/// its elements such that the matched sets are independent in `matrix`.
pub fn rado_independent(
    family: &[Vec<usize>],
    matrix: &PrimeFieldMatrix,
    subset: &[usize],
) -> bool {
    fn go(
        family: &[Vec<usize>],
        matrix: &PrimeFieldMatrix,
        subset: &[usize],
        i: usize,
        used: &mut Vec<usize>,
    ) -> bool {
        if i == subset.len() {
            return true;
        }
        for (h, set) in family.iter().enumerate() {
            if used.contains(&h) || !set.contains(&subset[i]) {
                continue;
            }
            used.push(h);
            if matrix.rank_of_columns(used) == used.len() && go(family, matrix, subset, i + 1, used)
            {
                used.pop();
                return true;
            }
            used.pop();
        }
        false
    }
    go(family, matrix, subset, 0, &mut Vec::new())
}
