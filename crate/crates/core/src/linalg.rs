//! Exact linear algebra over the rationals.
//!
//! Rows are stored sparsely as `(column, value)` pairs sorted by column. The
//! echelon structure is built incrementally, which suits the tall, very
//! sparse systems produced by the invariant search.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type SparseRow = Vec<(usize, BigRational)>;

pub fn sparse_from_dense(row: &[BigRational]) -> SparseRow {
    row.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (c, v.clone()))
        .collect()
}

/// `a - factor * b` on sorted sparse rows.
fn axpy(a: &SparseRow, factor: &BigRational, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(factor * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - factor * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incrementally maintained row-echelon form. Each stored row has leading
/// coefficient 1 at its pivot column.
#[derive(Debug, Clone)]
pub struct RowEchelon {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl RowEchelon {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the current pivots and stores the remainder.
    /// Returns whether the row was independent of the rows seen so far.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|(_, v)| !v.is_zero());
        loop {
            let Some((lead, lead_val)) = row.first().cloned() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(pivot_row) => row = axpy(&row, &lead_val, pivot_row),
                None => {
                    let inv = lead_val.recip();
                    for (_, v) in row.iter_mut() {
                        *v *= &inv;
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    /// Fully reduced rows, each paired with its pivot column, in increasing
    /// pivot order.
    pub fn into_rref(self) -> Vec<(usize, SparseRow)> {
        let mut rows: Vec<(usize, SparseRow)> = self.pivots.into_iter().collect();
        // Back substitution from the last pivot upwards.
        for idx in (0..rows.len()).rev() {
            let (pc, prow) = rows[idx].clone();
            for (_, row) in rows[..idx].iter_mut() {
                if let Ok(pos) = row.binary_search_by_key(&pc, |(c, _)| *c) {
                    let factor = row[pos].1.clone();
                    *row = axpy(row, &factor, &prow);
                }
            }
        }
        rows
    }

    /// Basis of the right nullspace: one vector per free column, with a 1 in
    /// that column and zeros in the other free columns.
    pub fn nullspace(self) -> Vec<Vec<BigRational>> {
        let ncols = self.ncols;
        let rref = self.into_rref();
        let pivot_cols: Vec<usize> = rref.iter().map(|(c, _)| *c).collect();
        let mut is_pivot = vec![false; ncols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..ncols).filter(|c| !is_pivot[*c]) {
            let mut v = vec![BigRational::zero(); ncols];
            v[free] = BigRational::one();
            for (pc, row) in &rref {
                if let Ok(pos) = row.binary_search_by_key(&free, |(c, _)| *c) {
                    v[*pc] = -row[pos].1.clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut ech = RowEchelon::new(ncols);
    for r in rows {
        ech.insert(sparse_from_dense(r));
    }
    ech.rank()
}

/// Nullspace basis with pivots taken leftmost (free variables on the right).
pub fn nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut ech = RowEchelon::new(ncols);
    for r in rows {
        ech.insert(sparse_from_dense(r));
    }
    ech.nullspace()
}

/// Nullspace basis with pivots taken rightmost, so the free variables are the
/// leading columns. Each basis vector has a 1 in exactly one leading free
/// column and involves only later columns otherwise.
pub fn nullspace_trailing_pivots(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let reversed: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().rev().cloned().collect())
        .collect();
    let mut basis: Vec<Vec<BigRational>> = nullspace(&reversed, ncols)
        .into_iter()
        .map(|v| v.into_iter().rev().collect())
        .collect();
    basis.reverse();
    basis
}
