//! Cover-promise solver for linear-matroid constraints.

use super::field::PrimeFieldMatrix;
use super::intersection::matroid_intersection;
use super::rado::rado_representation;
use super::xwb::{xwi, XwiQuery};
use crate::error::{Error, Result};
use crate::fcp::{FcpInstance, FcpSolution};
use crate::matching::saturates_left;
use crate::model::FacilityConstraint;
use crate::seed;

/// Bit offsets packing one weight per color into a single integer. Color l
/// gets ⌈log₂(W_l + 1)⌉ bits, so sums over any subset never carry.
pub fn packing_offsets(totals: &[u64]) -> Result<Vec<u32>> {
    let mut offsets = Vec::with_capacity(totals.len());
    let mut off = 0u32;
    for &w in totals {
        offsets.push(off);
        off += 64 - w.leading_zeros();
    }
    if off > 62 {
        return Err(Error::SizeLimitExceeded {
            what: "packed weight bits",
            size: off as usize,
            limit: 62,
        });
    }
    Ok(offsets)
}

pub fn pack(values: &[u64], offsets: &[u32]) -> u64 {
    values.iter().zip(offsets).map(|(&v, &o)| v << o).sum()
}

/// Guesses λ_l ∈ [m_l, W_l] (lexicographically descending), finds a Rado
/// independent set T of exactly those color weights, then recovers an
/// M-independent family that has T as a system of representatives.
pub fn solve_fcp_linear_matroid(
    fcp: &FcpInstance,
    seed: u64,
    reps: u32,
) -> Result<Option<FcpSolution>> {
    let FacilityConstraint::LinearMatroid { prime, columns } = &fcp.constraint else {
        return Err(Error::ConstraintMismatch(
            "linear-matroid solver needs a linear-matroid constraint",
        ));
    };
    let m = PrimeFieldMatrix::from_columns(*prime, 0, columns)?;
    let n = fcp.n_elements();
    let totals = fcp.total_weights();
    if totals.iter().zip(&fcp.requirements).any(|(w, m)| m > w) {
        return Ok(None);
    }
    let rado = rado_representation(n, &fcp.sets, &m, seed::derive(seed, &[0]))?;
    let offsets = packing_offsets(&totals)?;
    let packed: Vec<u64> = fcp.weights.iter().map(|w| pack(w, &offsets)).collect();

    let gamma = fcp.gamma();
    let mut guess = totals.clone();
    let mut index = 0u64;
    loop {
        let query = XwiQuery {
            matrix: rado.clone(),
            weights: packed.clone(),
            target: pack(&guess, &offsets),
            seed: seed::derive(seed, &[1, index]),
            reps,
        };
        if let Some(t) = xwi(&query)? {
            if let Some(sol) = recover_family(fcp, &m, &t)? {
                return Ok(Some(sol));
            }
        }
        index += 1;
        // next guess in descending lexicographic order
        let mut l = gamma;
        loop {
            if l == 0 {
                return Ok(None);
            }
            l -= 1;
            if guess[l] > fcp.requirements[l] {
                guess[l] -= 1;
                guess[l + 1..gamma].copy_from_slice(&totals[l + 1..gamma]);
                break;
            }
        }
    }
}

/// A family independent in M whose members can be matched onto all of `t`.
fn recover_family(
    fcp: &FcpInstance,
    m: &PrimeFieldMatrix,
    t: &[usize],
) -> Result<Option<FcpSolution>> {
    let adj: Vec<Vec<usize>> = fcp
        .sets
        .iter()
        .map(|set| (0..t.len()).filter(|&j| set.contains(&t[j])).collect())
        .collect();
    let transversal = |s: &[usize]| {
        let a: Vec<Vec<usize>> = s.iter().map(|&h| adj[h].clone()).collect();
        saturates_left(&a, t.len())
    };
    let linear = |s: &[usize]| m.rank_of_columns(s) == s.len();
    let mut sets = matroid_intersection(fcp.n_sets(), transversal, linear);
    if sets.len() != t.len() {
        return Ok(None);
    }
    sets.sort_unstable();
    let covered = fcp.union_weight(&sets);
    if !fcp.meets_requirements(&covered) || !fcp.constraint.is_feasible(&sets)? {
        return Ok(None);
    }
    Ok(Some(FcpSolution {
        sets,
        covered,
        cost: None,
    }))
}
