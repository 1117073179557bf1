//! Compressed-row symmetric systems built from element dof lists.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix whose pattern couples every pair of dofs sharing a cell.
    pub fn from_cells<'a>(n: usize, cells: impl Iterator<Item = &'a [usize]>) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for dofs in cells {
            for &i in dofs {
                rows[i].extend_from_slice(dofs);
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(i);
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        Self {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    /// Sums duplicate triplets in input order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j, _) in triplets {
            rows[i].push(j);
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        let mut m = Self {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        };
        for &(i, j, v) in triplets {
            m.add(i, j, v);
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    #[inline]
    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi].binary_search(&j).ok().map(|p| lo + p)
    }

    /// Adds `v` to entry `(i, j)`, which must be in the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside the sparsity pattern"));
        self.values[p] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    /// Adds a dense element matrix (row-major, `dofs.len()` squared).
    pub fn add_local(&mut self, dofs: &[usize], local: &[f64]) {
        let n = dofs.len();
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                self.add(i, j, local[a * n + b]);
            }
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji| / max |A_ij|`
    pub fn asymmetry(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// `a * self + b * other`; both must share the pattern.
    pub fn combine(&self, a: f64, other: &CsrMatrix, b: f64) -> Result<CsrMatrix> {
        if self.row_ptr != other.row_ptr || self.col_idx != other.col_idx {
            return Err(Error::SingularSystem(
                "combining matrices with different patterns".into(),
            ));
        }
        let mut out = self.clone();
        for (o, (x, y)) in out.values.iter_mut().zip(self.values.iter().zip(&other.values)) {
            *o = a * x + b * y;
        }
        Ok(out)
    }

    pub fn scaled(&self, a: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= a);
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] += v;
            }
        }
        d
    }

    /// Symmetric permutation `P A P^T` with `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> CsrMatrix {
        let mut inv = vec![0; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut triplets = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                triplets.push((inv[i], inv[j], v));
            }
        }
        Self::from_triplets(self.n, &triplets)
    }
}

/// Symmetric sparse matrix, load vector and the constrained-dof mask.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub constrained: Vec<bool>,
}

impl SparseSystem {
    pub fn ndof(&self) -> usize {
        self.matrix.n
    }

    pub fn n_free(&self) -> usize {
        self.constrained.iter().filter(|&&c| !c).count()
    }

    /// Zeroes constrained rows and columns, puts 1 on their diagonal and 0 in
    /// the load, so the prescribed value 0 is the unique solution component.
    pub fn eliminate_constraints(&self) -> SparseSystem {
        let mut m = self.matrix.clone();
        for i in 0..m.n {
            let (lo, hi) = (m.row_ptr[i], m.row_ptr[i + 1]);
            for p in lo..hi {
                let j = m.col_idx[p];
                if self.constrained[i] || self.constrained[j] {
                    m.values[p] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
        let rhs = self
            .rhs
            .iter()
            .zip(&self.constrained)
            .map(|(&b, &c)| if c { 0.0 } else { b })
            .collect();
        SparseSystem {
            matrix: m,
            rhs,
            constrained: self.constrained.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_from_cells() {
        let cells = [vec![0, 1], vec![1, 2]];
        let m = CsrMatrix::from_cells(3, cells.iter().map(|c| c.as_slice()));
        assert_eq!(m.nnz(), 7);
        assert_eq!(m.get(0, 2), 0.0);
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0), (0, 1, -1.0), (1, 1, 5.0)]);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![2.0, 4.0]);
        assert_eq!(m.asymmetry(), 0.0);
    }

    #[test]
    fn elimination_keeps_symmetry() {
        let m = CsrMatrix::from_triplets(
            3,
            &[
                (0, 0, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 2.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
                (2, 2, 2.0),
            ],
        );
        let sys = SparseSystem {
            matrix: m,
            rhs: vec![1.0, 1.0, 1.0],
            constrained: vec![true, false, false],
        };
        let e = sys.eliminate_constraints();
        assert_eq!(e.matrix.get(0, 0), 1.0);
        assert_eq!(e.matrix.get(0, 1), 0.0);
        assert_eq!(e.matrix.get(1, 0), 0.0);
        assert_eq!(e.rhs[0], 0.0);
        assert_eq!(e.matrix.asymmetry(), 0.0);
    }

    #[test]
    fn combination_on_shared_pattern() {
        let a = CsrMatrix::identity(3);
        let b = a.scaled(2.0);
        let c = a.combine(3.0, &b, 0.5).unwrap();
        assert_eq!(c.diagonal(), vec![4.0; 3]);
    }
}
