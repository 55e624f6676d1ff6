//! Exact rational linear programming: two-phase primal simplex with Bland's
//! rule over arbitrary-precision rationals.
//!
//! Variables are nonnegative; every optimum returned is a basic feasible
//! solution, so vertex-counting arguments apply to it verbatim.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_u(n: u64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Sparse (variable, coefficient) pairs.
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// minimize c·x subject to rows, x >= 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<Rational>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            objective: vec![Rational::zero(); n_vars],
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, terms: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(terms.iter().all(|&(v, _)| v < self.n_vars));
        self.rows.push(Row {
            terms,
            relation,
            rhs,
        });
    }

    /// x_v <= 1.
    pub fn add_upper_bound(&mut self, v: usize, bound: Rational) {
        self.add_row(vec![(v, Rational::one())], Relation::Le, bound);
    }

    pub fn solve(&self) -> LpOutcome {
        solve(self)
    }
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    basis: Vec<usize>,
    n_cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.a[r][c].recip();
        for v in self.a[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.b[r] *= &inv;
        let pivot_row = self.a[r].clone();
        let pivot_b = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for (dst, src) in self.a[i].iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *dst -= &f * src;
                }
            }
            self.b[i] -= &f * &pivot_b;
        }
        self.basis[r] = c;
    }

    /// Bland's rule minimisation over columns allowed by `allowed`.
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let mut is_basic = vec![false; self.n_cols];
            for &j in &self.basis {
                is_basic[j] = true;
            }
            let entering = (0..self.n_cols).find(|&j| {
                if is_basic[j] || !allowed(j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (i, &bj) in self.basis.iter().enumerate() {
                    if !self.a[i][j].is_zero() && !cost[bj].is_zero() {
                        d -= &cost[bj] * &self.a[i][j];
                    }
                }
                d.is_negative()
            });
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.b[i] / &self.a[i][c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, c);
        }
    }
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.n_vars;
    let m = lp.rows.len();
    // column layout: originals, one slack/surplus per inequality, artificials
    let n_slack = lp
        .rows
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count();
    let mut a = vec![Vec::new(); m];
    let mut b = Vec::with_capacity(m);
    let mut needs_artificial = Vec::with_capacity(m);
    let mut slack_col = n;
    let mut slack_of_row = vec![None; m];
    for (i, row) in lp.rows.iter().enumerate() {
        let mut dense = vec![Rational::zero(); n + n_slack];
        for (v, coef) in &row.terms {
            dense[*v] += coef;
        }
        let mut rhs = row.rhs.clone();
        let mut rel = row.relation;
        if rel != Relation::Eq {
            dense[slack_col] = if rel == Relation::Le { rat(1) } else { rat(-1) };
            slack_of_row[i] = Some(slack_col);
            slack_col += 1;
        }
        if rhs.is_negative() {
            for v in dense.iter_mut() {
                *v = -v.clone();
            }
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        // a Le row (after sign fix) has a +1 slack usable as initial basis
        needs_artificial.push(rel != Relation::Le);
        a[i] = dense;
        b.push(rhs);
    }
    let n_struct = n + n_slack;
    let n_art = needs_artificial.iter().filter(|&&x| x).count();
    let n_cols = n_struct + n_art;
    let mut basis = Vec::with_capacity(m);
    let mut art = n_struct;
    for i in 0..m {
        a[i].resize(n_cols, Rational::zero());
        if needs_artificial[i] {
            a[i][art] = rat(1);
            basis.push(art);
            art += 1;
        } else {
            basis.push(slack_of_row[i].expect("inequality row"));
        }
    }
    let mut t = Tableau {
        a,
        b,
        basis,
        n_cols,
    };

    if n_art > 0 {
        let mut phase1 = vec![Rational::zero(); n_cols];
        for c in phase1.iter_mut().skip(n_struct) {
            *c = rat(1);
        }
        t.optimize(&phase1, &|_| true);
        let infeas: Rational = t
            .basis
            .iter()
            .zip(&t.b)
            .filter(|(&j, _)| j >= n_struct)
            .map(|(_, v)| v.clone())
            .sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.a.len() {
            if t.basis[i] >= n_struct {
                match (0..n_struct).find(|&j| !t.a[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.a.remove(i);
                        t.b.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); n_cols];
    cost[..n].clone_from_slice(&lp.objective);
    if !t.optimize(&cost, &|j| j < n_struct) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = t.b[i].clone();
        }
    }
    let value = x.iter().zip(&lp.objective).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { x, value }
}

pub fn is_integral(q: &Rational) -> bool {
    q.is_integer()
}
