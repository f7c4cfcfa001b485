//! Incremental sparse row reduction over the rationals.
//!
//! Rows encode affine equations `Σ c_i x_i + constant = 0`. The reducer keeps its
//! pivot rows in reduced echelon form, so every pivot variable is expressed through
//! free variables only.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::novikov::add_coeff;
use crate::Q;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub coeffs: BTreeMap<usize, Q>,
    pub constant: Q,
}

impl Row {
    pub fn new() -> Self {
        Row { coeffs: BTreeMap::new(), constant: Q::zero() }
    }

    pub fn add(&mut self, var: usize, c: Q) {
        add_coeff(&mut self.coeffs, var, c);
    }

    pub fn add_row(&mut self, other: &Row, factor: &Q) {
        if factor.is_zero() {
            return;
        }
        for (v, c) in &other.coeffs {
            add_coeff(&mut self.coeffs, *v, c * factor);
        }
        self.constant += &other.constant * factor;
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }
}

/// The system has no solution: a row reduced to `constant = 0` with nonzero constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Inconsistent(pub Q);

#[derive(Clone, Debug, Default)]
pub struct Reducer {
    pivots: BTreeMap<usize, Row>,
}

impl Reducer {
    pub fn new() -> Self {
        Reducer::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_pivot(&self, var: usize) -> bool {
        self.pivots.contains_key(&var)
    }

    /// Reduces `row` against the current pivots without inserting it.
    pub fn reduce(&self, row: &Row) -> Row {
        let mut out = row.clone();
        let hits: Vec<(usize, Q)> =
            row.coeffs.iter().filter(|(v, _)| self.pivots.contains_key(v)).map(|(v, c)| (*v, c.clone())).collect();
        for (v, c) in hits {
            out.add_row(&self.pivots[&v], &-c);
        }
        out
    }

    /// Inserts an equation. Returns whether it raised the rank.
    pub fn insert(&mut self, row: Row) -> Result<bool, Inconsistent> {
        let mut r = self.reduce(&row);
        let Some((&p, c)) = r.coeffs.iter().next() else {
            if r.constant.is_zero() {
                return Ok(false);
            }
            return Err(Inconsistent(r.constant));
        };
        let inv = Q::one() / c;
        let mut normalized = Row::new();
        normalized.add_row(&r, &inv);
        r = normalized;
        for prow in self.pivots.values_mut() {
            if let Some(c) = prow.coeffs.get(&p).cloned() {
                prow.add_row(&r, &-c);
            }
        }
        self.pivots.insert(p, r);
        Ok(true)
    }

    /// Solves with free variables `0..num_vars` assigned by `free`.
    pub fn solve(&self, num_vars: usize, mut free: impl FnMut(usize) -> Q) -> Vec<Q> {
        let mut x = vec![Q::zero(); num_vars];
        for (v, slot) in x.iter_mut().enumerate() {
            if !self.pivots.contains_key(&v) {
                *slot = free(v);
            }
        }
        for (p, row) in &self.pivots {
            let mut val = -row.constant.clone();
            for (v, c) in &row.coeffs {
                if v != p {
                    val -= c * &x[*v];
                }
            }
            x[*p] = val;
        }
        x
    }
}

/// Rank of a dense matrix.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut red = Reducer::new();
    for r in rows {
        let mut row = Row::new();
        for (j, c) in r.iter().enumerate() {
            row.add(j, c.clone());
        }
        red.insert(row).expect("homogeneous rows are consistent");
    }
    red.rank()
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for c in 0..n {
        let mut red = Reducer::new();
        for (i, r) in m.iter().enumerate() {
            let mut row = Row::new();
            for (j, x) in r.iter().enumerate() {
                row.add(j, x.clone());
            }
            if i == c {
                row.constant = -Q::one();
            }
            red.insert(row).ok()?;
        }
        if red.rank() < n {
            return None;
        }
        cols.push(red.solve(n, |_| Q::zero()));
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}
