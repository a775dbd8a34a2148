use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real symmetric sparse matrix in row-compressed form.
///
/// Every operator in this crate (hopping Hamiltonian, Stark/disorder
/// potential, dipole, imbalance) has real matrix elements, so Hermitian
/// reduces to symmetric. Diagonal operators skip the CSR arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dimension: usize,
    diagonal: Vec<f64>,
    /// Off-diagonal entries only. Empty for diagonal operators.
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
    is_diagonal: bool,
}

impl SparseOperator {
    pub fn from_diagonal(diagonal: Vec<f64>) -> Self {
        SparseOperator {
            dimension: diagonal.len(),
            row_ptr: vec![0; diagonal.len() + 1],
            cols: Vec::new(),
            values: Vec::new(),
            diagonal,
            is_diagonal: true,
        }
    }

    /// Builds from per-row off-diagonal entries. Rows are sorted by column;
    /// symmetry is checked exactly.
    pub fn from_rows(diagonal: Vec<f64>, mut rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let dimension = diagonal.len();
        if rows.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: rows.len(),
            });
        }
        let mut row_ptr = Vec::with_capacity(dimension + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::InvalidArgument(format!("duplicate entry ({r}, {})", w[0].0)));
                }
            }
            for &(c, v) in row.iter() {
                if c >= dimension || c == r {
                    return Err(Error::InvalidArgument(format!("bad off-diagonal entry ({r}, {c})")));
                }
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        let op = SparseOperator {
            dimension,
            diagonal,
            is_diagonal: cols.is_empty(),
            row_ptr,
            cols,
            values,
        };
        if let Some((r, c)) = op.first_asymmetry() {
            return Err(Error::InvalidArgument(format!("operator not symmetric at ({r}, {c})")));
        }
        Ok(op)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_diagonal
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn nnz(&self) -> usize {
        self.dimension + self.cols.len()
    }

    /// Off-diagonal entries of row `r` as (column, value).
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    /// Matrix element ⟨r|A|c⟩.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r == c {
            return self.diagonal[r];
        }
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    fn first_asymmetry(&self) -> Option<(usize, usize)> {
        for r in 0..self.dimension {
            for (c, v) in self.row(r) {
                if self.get(c, r) != v {
                    return Some((r, c));
                }
            }
        }
        None
    }

    /// y = A x for complex x.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dimension);
        debug_assert_eq!(y.len(), self.dimension);
        for r in 0..self.dimension {
            let mut acc = x[r] * self.diagonal[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k]] * self.values[k];
            }
            y[r] = acc;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dimension];
        self.apply_into(x, &mut y);
        y
    }

    /// y = A x for real x.
    pub fn apply_real_into(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.dimension {
            let mut acc = x[r] * self.diagonal[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k]] * self.values[k];
            }
            y[r] = acc;
        }
    }

    /// ⟨x|A|x⟩ (real since A is symmetric).
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        if self.is_diagonal {
            return x
                .iter()
                .zip(&self.diagonal)
                .map(|(a, d)| a.norm_sqr() * d)
                .sum();
        }
        let mut total = 0.0;
        for r in 0..self.dimension {
            let mut acc = x[r] * self.diagonal[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k]] * self.values[k];
            }
            total += (x[r].conj() * acc).re;
        }
        total
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dimension)
            .map(|r| self.diagonal[r].abs() + self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    /// A + shift·I.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        out.diagonal.iter_mut().for_each(|d| *d += shift);
        out
    }

    /// scale·A.
    pub fn scaled(&self, scale: f64) -> Self {
        let mut out = self.clone();
        out.diagonal.iter_mut().for_each(|d| *d *= scale);
        out.values.iter_mut().for_each(|v| *v *= scale);
        out
    }

    /// Dense row-major copy. Intended for small dimensions.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dimension;
        let mut m = vec![0.0; n * n];
        for r in 0..n {
            m[r * n + r] = self.diagonal[r];
            for (c, v) in self.row(r) {
                m[r * n + c] = v;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn symmetric_rows_accepted() {
        let op = SparseOperator::from_rows(vec![1.0, 2.0], vec![vec![(1, 3.0)], vec![(0, 3.0)]]).unwrap();
        assert_eq!(op.apply(&[c(1.0), c(1.0)]), vec![c(4.0), c(5.0)]);
        assert_eq!(op.to_dense(), vec![1.0, 3.0, 3.0, 2.0]);
        assert_eq!(op.norm_inf(), 5.0);
        assert!(!op.is_diagonal());
    }

    #[test]
    fn asymmetric_rows_rejected() {
        assert!(SparseOperator::from_rows(vec![0.0, 0.0], vec![vec![(1, 3.0)], vec![]]).is_err());
        assert!(SparseOperator::from_rows(vec![0.0, 0.0], vec![vec![(1, 3.0)], vec![(0, 2.0)]]).is_err());
    }

    #[test]
    fn expectation_matches_apply() {
        let op = SparseOperator::from_rows(vec![1.0, -2.0], vec![vec![(1, 0.5)], vec![(0, 0.5)]]).unwrap();
        let x = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let y = op.apply(&x);
        let direct: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
        assert!((op.expectation(&x) - direct).abs() < 1e-15);
    }
}
