//! Exact-weight bases and independent sets of linear matroids.
//!
//! For A of full row rank ρ and D(y) = diag(r_e·y^{w(e)}), Cauchy–Binet gives
//! det(A·D(y)·Aᵀ) = Σ_B det(A_B)²·Π_{e∈B} r_e·y^{w(B)} over bases B. The
//! coefficient of y^λ is a nonzero polynomial in r exactly when a basis of
//! weight λ exists, so a random r detects it with probability ≥ 1 − ρ/p and
//! never reports a basis that does not exist.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::field::{add_mod, determinant, inv_mod, mul_mod, pow_mod, sub_mod, PrimeFieldMatrix};
use crate::error::{Error, Result};
use crate::seed;

/// Coefficients of the unique polynomial of degree < n through (i, ys[i]).
pub fn interpolate_at_naturals(ys: &[u64], p: u64) -> Vec<u64> {
    let n = ys.len();
    // master = Π_i (y − i), degree n
    let mut master = vec![0u64; n + 1];
    master[0] = 1;
    for i in 0..n as u64 {
        let neg = sub_mod(0, i % p, p);
        for k in (0..=n).rev() {
            let shifted = if k > 0 { master[k - 1] } else { 0 };
            master[k] = add_mod(shifted, mul_mod(master[k], neg, p), p);
        }
    }
    let mut coef = vec![0u64; n];
    let mut q = vec![0u64; n];
    for (i, &yi) in ys.iter().enumerate() {
        if yi == 0 {
            continue;
        }
        let xi = i as u64 % p;
        // q = master / (y − xi) by synthetic division
        let mut carry = 0u64;
        for k in (0..n).rev() {
            carry = add_mod(master[k + 1], mul_mod(carry, xi, p), p);
            q[k] = carry;
        }
        let mut denom = 0u64;
        for k in (0..n).rev() {
            denom = add_mod(mul_mod(denom, xi, p), q[k], p);
        }
        let scale = mul_mod(yi, inv_mod(denom, p), p);
        for k in 0..n {
            coef[k] = add_mod(coef[k], mul_mod(scale, q[k], p), p);
        }
    }
    coef
}

/// A matrix with its rows reduced to a basis of the row space.
struct Reduced {
    a: PrimeFieldMatrix,
    weights: Vec<u64>,
}

impl Reduced {
    fn new(matrix: &PrimeFieldMatrix, weights: &[u64]) -> Result<Self> {
        if weights.len() != matrix.cols() {
            return Err(Error::Shape(format!(
                "{} weights for {} columns",
                weights.len(),
                matrix.cols()
            )));
        }
        Ok(Self {
            a: matrix.row_basis(),
            weights: weights.to_vec(),
        })
    }

    fn rank(&self) -> usize {
        self.a.rows()
    }

    fn check_prime(&self) -> Result<()> {
        let total: u64 = self.weights.iter().sum();
        let p = self.a.prime();
        // total + 1 evaluation points, and p large enough for the rank bound
        let needed = total.max(self.rank() as u64);
        if needed >= p {
            return Err(Error::PrimeTooSmall { prime: p, needed });
        }
        Ok(())
    }

    /// One randomized trial on the columns `cols`. No false positives.
    fn trial(&self, cols: &[usize], target: u64, rng: &mut impl Rng) -> bool {
        let p = self.a.prime();
        let rho = self.rank();
        let deg: u64 = cols.iter().map(|&e| self.weights[e]).sum();
        if target > deg {
            return false;
        }
        if rho == 0 {
            return target == 0;
        }
        let r: Vec<u64> = cols.iter().map(|_| rng.gen_range(1..p)).collect();
        // outer products a_e a_eᵀ, flattened
        let outer: Vec<Vec<u64>> = cols
            .iter()
            .map(|&e| {
                let col = self.a.column(e);
                let mut m = Vec::with_capacity(rho * rho);
                for i in 0..rho {
                    for j in 0..rho {
                        m.push(mul_mod(col[i], col[j], p));
                    }
                }
                m
            })
            .collect();
        let mut values = Vec::with_capacity(deg as usize + 1);
        for y in 0..=deg {
            let mut m = vec![0u64; rho * rho];
            for (k, &e) in cols.iter().enumerate() {
                let s = mul_mod(r[k], pow_mod(y, self.weights[e], p), p);
                if s == 0 {
                    continue;
                }
                for (dst, &o) in m.iter_mut().zip(&outer[k]) {
                    *dst = add_mod(*dst, mul_mod(s, o, p), p);
                }
            }
            values.push(determinant(m, rho, p));
        }
        interpolate_at_naturals(&values, p)[target as usize] != 0
    }

    /// Whether `cols` contains a basis of the whole matroid of weight `target`.
    fn decide(&self, cols: &[usize], target: u64, seed: u64, reps: u32) -> bool {
        if self.a.rank_of_columns(cols) < self.rank() {
            return false;
        }
        (0..reps.max(1)).any(|t| {
            let mut rng = seed::rng(seed, &[t as u64]);
            self.trial(cols, target, &mut rng)
        })
    }
}

/// Randomized decision: does a basis of weight exactly `target` exist?
///
/// A `true` answer is always correct; a `false` answer is wrong with
/// probability at most (ρ/p)^reps.
pub fn has_exact_weight_basis(
    matrix: &PrimeFieldMatrix,
    weights: &[u64],
    target: u64,
    seed: u64,
    reps: u32,
) -> Result<bool> {
    let red = Reduced::new(matrix, weights)?;
    red.check_prime()?;
    let all: Vec<usize> = (0..matrix.cols()).collect();
    Ok(red.decide(&all, target, seed, reps))
}

/// A basis of weight exactly `target`, found by self-reduction.
///
/// Elements are tested for deletion in index order; a deletion is kept when
/// the rest still spans and still admits the target weight. Since positive
/// answers are never wrong, the surviving set always admits a solution, so
/// passes repeat until it is a basis.
pub fn exact_weight_basis(
    matrix: &PrimeFieldMatrix,
    weights: &[u64],
    target: u64,
    seed: u64,
    reps: u32,
) -> Result<Option<Vec<usize>>> {
    let red = Reduced::new(matrix, weights)?;
    red.check_prime()?;
    let mut keep: Vec<usize> = (0..matrix.cols()).collect();
    if !red.decide(&keep, target, seed::derive(seed, &[0]), reps) {
        return Ok(None);
    }
    let rho = red.rank();
    let passes = reps.max(1) as u64;
    for pass in 0..passes {
        let snapshot = keep.clone();
        for e in snapshot {
            let cand: Vec<usize> = keep.iter().copied().filter(|&x| x != e).collect();
            if red.decide(
                &cand,
                target,
                seed::derive(seed, &[1, pass, e as u64]),
                reps,
            ) {
                keep = cand;
            }
        }
        if keep.len() == rho {
            break;
        }
    }
    if keep.len() != rho {
        return Ok(None);
    }
    let weight: u64 = keep.iter().map(|&e| weights[e]).sum();
    if weight != target || matrix.rank_of_columns(&keep) != rho {
        return Err(Error::Internal(format!(
            "exact-weight basis failed verification: weight {weight}, target {target}"
        )));
    }
    Ok(Some(keep))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XwiQuery {
    pub matrix: PrimeFieldMatrix,
    pub weights: Vec<u64>,
    pub target: u64,
    pub seed: u64,
    pub reps: u32,
}

/// An independent set of weight exactly `target`.
///
/// Appending a zero-weight copy of every column turns independent sets of
/// weight λ into bases of weight λ: extend I to a basis and swap the added
/// elements for their copies.
pub fn xwi(query: &XwiQuery) -> Result<Option<Vec<usize>>> {
    let m = &query.matrix;
    let n = m.cols();
    if query.weights.len() != n {
        return Err(Error::Shape(format!(
            "{} weights for {n} columns",
            query.weights.len()
        )));
    }
    let mut cols = m.columns();
    cols.extend(m.columns());
    let doubled = PrimeFieldMatrix::from_columns(m.prime(), m.rows(), &cols)?;
    let mut weights = query.weights.clone();
    weights.extend(std::iter::repeat_n(0, n));
    let Some(basis) = exact_weight_basis(&doubled, &weights, query.target, query.seed, query.reps)?
    else {
        return Ok(None);
    };
    let out: Vec<usize> = basis.into_iter().filter(|&e| e < n).collect();
    let weight: u64 = out.iter().map(|&e| query.weights[e]).sum();
    if weight != query.target || m.rank_of_columns(&out) != out.len() {
        return Err(Error::Internal(
            "exact-weight independent set failed verification".into(),
        ));
    }
    Ok(Some(out))
}

/// Exhaustive reference: is there an independent set (or basis) of weight λ?
pub fn brute_force_exact_weight(
    matrix: &PrimeFieldMatrix,
    weights: &[u64],
    target: u64,
    bases_only: bool,
) -> Option<Vec<usize>> {
    let n = matrix.cols();
    assert!(n <= 24, "exhaustive search limited to 24 columns");
    let rank = matrix.rank();
    (0u32..1 << n).find_map(|mask| {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let w: u64 = s.iter().map(|&e| weights[e]).sum();
        let ok = w == target
            && (!bases_only || s.len() == rank)
            && matrix.rank_of_columns(&s) == s.len();
        ok.then_some(s)
    })
}
