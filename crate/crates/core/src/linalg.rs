//! Exact linear algebra over the rationals.
//!
//! Pivoting is deterministic: columns are scanned left to right and the first
//! row with a nonzero entry in the current column becomes the pivot row.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Vector = Vec<Scalar>;

/// A rectangular matrix storing only its nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    /// Builds from dense rows; every row must have length `cols`.
    pub fn from_rows(rows: &[Vector], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row {i}");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        if x.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), x);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    pub fn to_dense(&self) -> Vec<Vector> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (&(i, j), x) in &self.entries {
            out[i][j] = x.clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for (&(i, j), x) in &self.entries {
            m.entries.insert((j, i), x.clone());
        }
        m
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Scalar::zero(); self.rows];
        for (&(i, j), x) in &self.entries {
            if !v[j].is_zero() {
                out[i] += x * &v[j];
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.entries.iter().all(|(&(i, j), x)| self.get(j, i) == *x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: SparseMatrix,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
}

/// In-place reduced row echelon form of dense rows. Returns pivot columns.
pub(crate) fn rref_in_place(rows: &mut [Vector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rref(m: &SparseMatrix) -> Rref {
    let mut rows = m.to_dense();
    let pivot_cols = rref_in_place(&mut rows, m.cols);
    let rank = pivot_cols.len();
    Rref { reduced: SparseMatrix::from_rows(&rows, m.cols), pivot_cols, rank }
}

pub fn rank(m: &SparseMatrix) -> usize {
    rref(m).rank
}

/// Basis of `{x : m x = 0}`, one vector per free column, in column order.
pub fn nullspace(m: &SparseMatrix) -> Vec<Vector> {
    let mut rows = m.to_dense();
    let pivots = rref_in_place(&mut rows, m.cols);
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); m.cols];
        v[free] = Scalar::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[r][free].clone();
        }
        out.push(v);
    }
    out
}

/// Coefficients `a` with `sum_i a_i basis[i] = target`. Free coefficients are
/// set to zero, so the answer is deterministic even for dependent bases.
pub fn solve_in_span(basis: &[Vector], target: &[Scalar]) -> Result<Vector> {
    let dim = target.len();
    if let Some(bad) = basis.iter().position(|b| b.len() != dim) {
        return Err(Error::PreconditionViolation(format!(
            "basis vector {bad} has length {} but target has length {dim}",
            basis[bad].len()
        )));
    }
    let n = basis.len();
    // augmented system [A | target] with the basis vectors as columns
    let mut rows: Vec<Vector> = (0..dim)
        .map(|i| {
            let mut row: Vector = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref_in_place(&mut rows, n + 1);
    if pivots.last() == Some(&n) {
        return Err(Error::NotInSpan);
    }
    let mut coeffs = vec![Scalar::zero(); n];
    for (r, &pc) in pivots.iter().enumerate() {
        coeffs[pc] = rows[r][n].clone();
    }
    Ok(coeffs)
}

/// Inverse of a square matrix given as dense rows, if it exists.
pub fn invert(m: &[Vector]) -> Option<Vec<Vector>> {
    let n = m.len();
    let mut rows: Vec<Vector> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let pivots = rref_in_place(&mut rows, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Incrementally built echelon basis used for rank and span membership.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    dim: usize,
    rows: Vec<(usize, Vector)>,
}

impl EchelonBasis {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after eliminating the stored pivots.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` if it is independent of the stored rows; reports whether it was.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        self.rows.push((p, r));
        true
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &Vector> {
        self.rows.iter().map(|(_, r)| r)
    }
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}
