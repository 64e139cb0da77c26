//! Compressed-row sparse matrices, just enough for graph propagation.

use nalgebra::DMatrix;

use crate::error::{dim_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets. Duplicate coordinates are summed
    /// and columns are sorted within each row.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            let slot = next[r];
            cols[slot] = c;
            vals[slot] = v;
            next[r] += 1;
        }

        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..nrows {
            let mut row: Vec<(usize, f64)> = (counts[r]..counts[r + 1])
                .map(|k| (cols[k], vals[k]))
                .collect();
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                match col_idx.last() {
                    Some(&last) if last == c && col_idx.len() > row_ptr[r] => {
                        *values.last_mut().unwrap() += v;
                    }
                    _ => {
                        col_idx.push(c);
                        values.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Entry-wise map that keeps the sparsity pattern; `f(i, j, v)`.
    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.values[k] = f(i, self.col_idx[k], self.values[k]);
            }
        }
        out
    }

    /// `self + c·I` (square matrices only).
    pub fn add_scaled_identity(&self, c: f64) -> Self {
        let mut t: Vec<(usize, usize, f64)> = self.triplets().collect();
        t.extend((0..self.nrows).map(|i| (i, i, c)));
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_entries(|_, _, v| c * v)
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<(usize, usize, f64)> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows == self.ncols && self.triplets().all(|(i, j, v)| (v - self.get(j, i)).abs() <= tol)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    /// `self · x` for a dense right-hand side, column by column.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.nrows() != self.ncols {
            return Err(dim_err(
                format!("{} rows", self.ncols),
                format!("{} rows", x.nrows()),
            ));
        }
        let mut out = DMatrix::zeros(self.nrows, x.ncols());
        for f in 0..x.ncols() {
            let src = x.column(f);
            let mut dst = out.column_mut(f);
            for i in 0..self.nrows {
                let (cols, vals) = self.row(i);
                let mut acc = 0.0;
                for (&j, &v) in cols.iter().zip(vals) {
                    acc += v * src[j];
                }
                dst[i] = acc;
            }
        }
        Ok(out)
    }

    /// `self · v` for a single vector.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &a)| a * v[j]).sum()
            })
            .collect()
    }
}
