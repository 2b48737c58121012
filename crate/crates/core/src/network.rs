//! The observed weight matrix and its 2×2 submatrices.

use crate::error::{Error, Result};

/// A dense `m × n` matrix of nonnegative edge weights, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteNetwork {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
}

impl BipartiteNetwork {
    /// Builds a network from row-major weights, checking shape, finiteness
    /// and nonnegativity.
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "network must have at least one row and one column, got {rows}×{cols}"
            )));
        }
        if weights.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} weights do not fill a {rows}×{cols} matrix",
                weights.len()
            )));
        }
        for (k, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite weight at row {}, column {}",
                    k / cols + 1,
                    k % cols + 1
                )));
            }
            if w < 0.0 {
                return Err(Error::NegativeEntry { row: k / cols + 1, col: k % cols + 1, value: w });
            }
        }
        Ok(Self { rows, cols, weights })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut weights = Vec::with_capacity(m * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::Ragged { row: i + 1, found: r.len(), expected: n });
            }
            weights.extend_from_slice(r);
        }
        Self::new(m, n, weights)
    }

    /// Constant matrix, mostly useful in tests.
    pub fn constant(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, weights: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), rows * cols);
        Self { rows, cols, weights }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.cols..(i + 1) * self.cols]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks_exact(self.cols)
    }

    /// The quadruplet on rows `(i1, i2)` and columns `(j1, j2)`, in that order.
    #[inline]
    pub fn quadruplet(&self, i1: usize, i2: usize, j1: usize, j2: usize) -> Quadruplet {
        Quadruplet([[self.get(i1, j1), self.get(i1, j2)], [self.get(i2, j1), self.get(i2, j2)]])
    }

    /// Fails unless at least one quadruplet exists (`m ≥ 2`, `n ≥ 2`).
    pub fn require_quadruplet(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::Dimension(format!(
                "a quadruplet needs m ≥ 2 and n ≥ 2, got {}×{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// Step index `N = m + n − 4`.
    pub fn n_index(&self) -> usize {
        (self.rows + self.cols).saturating_sub(4)
    }

    /// Observed row fraction `m / (m + n)`.
    pub fn c_hat(&self) -> f64 {
        self.rows as f64 / (self.rows + self.cols) as f64
    }

    /// Applies `Y'[i][j] = Y[row_perm[i]][col_perm[j]]`.
    ///
    /// Panics if either slice is not a permutation of the matching range.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        assert_eq!(row_perm.len(), self.rows);
        assert_eq!(col_perm.len(), self.cols);
        let mut weights = Vec::with_capacity(self.weights.len());
        for &i in row_perm {
            let r = self.row(i);
            weights.extend(col_perm.iter().map(|&j| r[j]));
        }
        Self::from_raw(self.rows, self.cols, weights)
    }

    /// Multiplies every weight by `s ≥ 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.weights.iter().map(|w| w * s).collect())
    }

    pub fn transposed(&self) -> Self {
        let mut weights = Vec::with_capacity(self.weights.len());
        for j in 0..self.cols {
            weights.extend((0..self.rows).map(|i| self.get(i, j)));
        }
        Self::from_raw(self.cols, self.rows, weights)
    }

    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0 || w == 1.0)
    }
}

/// A 2×2 submatrix `[[Y_{i1 j1}, Y_{i1 j2}], [Y_{i2 j1}, Y_{i2 j2}]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadruplet(pub [[f64; 2]; 2]);

impl Quadruplet {
    pub fn new(top: [f64; 2], bottom: [f64; 2]) -> Self {
        Self([top, bottom])
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.0[r][c]
    }

    pub fn swap_rows(self) -> Self {
        let [a, b] = self.0;
        Self([b, a])
    }

    pub fn swap_cols(self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self([[b, a], [d, c]])
    }

    pub fn entries(&self) -> [f64; 4] {
        let [[a, b], [c, d]] = self.0;
        [a, b, c, d]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_nonfinite() {
        assert!(matches!(
            BipartiteNetwork::new(1, 2, vec![1.0, -0.5]),
            Err(Error::NegativeEntry { row: 1, col: 2, .. })
        ));
        assert!(BipartiteNetwork::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(BipartiteNetwork::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn ragged_rows_name_the_row() {
        let err = BipartiteNetwork::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::Ragged { row: 2, found: 1, expected: 2 }));
    }

    #[test]
    fn indexing_quantities() {
        let y = BipartiteNetwork::constant(3, 5, 1.0).unwrap();
        assert_eq!(y.n_index(), 4);
        assert_eq!(y.c_hat(), 3.0 / 8.0);
        assert!(BipartiteNetwork::constant(1, 5, 1.0).unwrap().require_quadruplet().is_err());
    }

    #[test]
    fn permutation_and_transpose() {
        let y = BipartiteNetwork::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let p = y.permuted(&[1, 0], &[2, 0, 1]);
        assert_eq!(p.row(0), &[6.0, 4.0, 5.0]);
        assert_eq!(p.row(1), &[3.0, 1.0, 2.0]);
        let t = y.transposed();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.get(2, 1), 6.0);
    }

    #[test]
    fn quadruplet_swaps() {
        let q = Quadruplet::new([1.0, 2.0], [3.0, 4.0]);
        assert_eq!(q.swap_rows(), Quadruplet::new([3.0, 4.0], [1.0, 2.0]));
        assert_eq!(q.swap_cols(), Quadruplet::new([2.0, 1.0], [4.0, 3.0]));
    }
}
