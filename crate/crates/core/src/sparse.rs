//! Row-major sparse matrices over [`Rational`].
//!
//! Rows are ordered maps so iteration order, and therefore every serialized
//! matrix, is deterministic. Explicit zeros are never stored.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::Rational;

/// A sparse vector indexed by column.
pub type SparseRow = BTreeMap<usize, Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![SparseRow::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::from_integer(1.into()));
        }
        m
    }

    /// Builds a matrix from rows, dropping explicit zeros.
    ///
    /// Panics if a column index is out of range.
    pub fn from_rows(cols: usize, rows: Vec<SparseRow>) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        assert!(j < self.cols, "column {j} out of range ({})", self.cols);
        self.data[i].get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i}, {j}) out of range ({}x{})",
            self.rows,
            self.cols
        );
        if value.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, value);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) {
        let sum = self.get(i, j) + value;
        self.set(i, j, sum);
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(&j, v)| (i, j, v)))
    }

    pub fn row_sum(&self, i: usize) -> Rational {
        self.data[i]
            .values()
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Sparse product `self * rhs`.
    ///
    /// Panics on dimension mismatch.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "dimension mismatch: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = SparseRow::new();
            for (k, a) in row {
                for (j, b) in &rhs.data[*k] {
                    *acc.entry(*j).or_insert_with(Rational::zero) += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        out
    }

    /// Multiplies row `i` by -1.
    pub fn negate_row(&mut self, i: usize) {
        for v in self.data[i].values_mut() {
            *v = -v.clone();
        }
    }

    /// Multiplies column `j` by -1.
    pub fn negate_col(&mut self, j: usize) {
        for row in &mut self.data {
            if let Some(v) = row.get_mut(&j) {
                *v = -v.clone();
            }
        }
    }

    /// First entry where `self` and `other` differ, in row-major order.
    pub fn first_difference(&self, other: &SparseMatrix) -> Option<(usize, usize)> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (i, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            if a != b {
                let j = a
                    .keys()
                    .chain(b.keys())
                    .copied()
                    .filter(|j| a.get(j) != b.get(j))
                    .min()
                    .expect("rows differ");
                return Some((i, j));
            }
        }
        None
    }
}
