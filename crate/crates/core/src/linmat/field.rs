//! Arithmetic in F_p for word-sized primes and dense matrices over it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse by Fermat; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero");
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Dense row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFieldMatrix {
    prime: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl PrimeFieldMatrix {
    pub fn new(prime: u64, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NonPrimeField(prime));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        let data = data.into_iter().map(|v| v % prime).collect();
        Ok(Self {
            prime,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(prime: u64, rows: usize, cols: usize) -> Result<Self> {
        Self::new(prime, rows, cols, vec![0; rows * cols])
    }

    /// Builds a matrix from its columns; all columns must have equal length.
    /// `rows` is only consulted when `columns` is empty.
    pub fn from_columns(prime: u64, rows: usize, columns: &[Vec<u64>]) -> Result<Self> {
        let rows = columns.first().map_or(rows, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Shape("matrix columns have unequal lengths".into()));
        }
        let cols = columns.len();
        let mut data = vec![0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Self::new(prime, rows, cols, data)
    }

    /// Builds a matrix from its rows.
    pub fn from_rows(prime: u64, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(cols, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("matrix rows have unequal lengths".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(prime, rows.len(), cols, data)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.prime;
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn select_columns(&self, subset: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * subset.len());
        for i in 0..self.rows {
            for &j in subset {
                data.push(self.get(i, j));
            }
        }
        Self {
            prime: self.prime,
            rows: self.rows,
            cols: subset.len(),
            data,
        }
    }

    /// Row-reduces a copy and returns (rank, pivot row count == rank rows).
    fn echelon(&self) -> (usize, Vec<u64>) {
        let p = self.prime;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
                continue;
            };
            if pivot != rank {
                for k in 0..cols {
                    m.swap(pivot * cols + k, rank * cols + k);
                }
            }
            let inv = inv_mod(m[rank * cols + col], p);
            for k in col..cols {
                m[rank * cols + k] = mul_mod(m[rank * cols + k], inv, p);
            }
            for r in 0..rows {
                if r == rank {
                    continue;
                }
                let factor = m[r * cols + col];
                if factor == 0 {
                    continue;
                }
                for k in col..cols {
                    let v = mul_mod(factor, m[rank * cols + k], p);
                    m[r * cols + k] = sub_mod(m[r * cols + k], v, p);
                }
            }
            rank += 1;
        }
        (rank, m)
    }

    pub fn rank(&self) -> usize {
        self.echelon().0
    }

    /// An equivalent matrix (same column matroid) with exactly `rank` rows.
    pub fn row_basis(&self) -> Self {
        let (rank, m) = self.echelon();
        Self {
            prime: self.prime,
            rows: rank,
            cols: self.cols,
            data: m[..rank * self.cols].to_vec(),
        }
    }

    pub fn rank_of_columns(&self, subset: &[usize]) -> usize {
        self.select_columns(subset).rank()
    }
}

/// Determinant of a square row-major matrix over F_p (consumes the buffer).
pub fn determinant(mut m: Vec<u64>, n: usize, p: u64) -> u64 {
    debug_assert_eq!(m.len(), n * n);
    let mut det = 1u64;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r * n + col] != 0) else {
            return 0;
        };
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            det = sub_mod(0, det, p);
        }
        let pv = m[col * n + col];
        det = mul_mod(det, pv, p);
        let inv = inv_mod(pv, p);
        for r in col + 1..n {
            let factor = mul_mod(m[r * n + col], inv, p);
            if factor == 0 {
                continue;
            }
            for k in col..n {
                let v = mul_mod(factor, m[col * n + k], p);
                m[r * n + k] = sub_mod(m[r * n + k], v, p);
            }
        }
    }
    det
}
