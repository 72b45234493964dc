//! Minimal CSR matrix used for sparse inputs and neighbor aggregation.

use ndarray::{Array2, ArrayView2};

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Keeps the non-zero entries of `dense`.
    pub fn from_dense(dense: ArrayView2<'_, f64>) -> Self {
        let (rows, cols) = dense.dim();
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in dense.rows() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { rows, cols, indptr, indices, values }
    }

    /// Row-normalized adjacency `D^-1 A`. Isolated nodes get an empty row,
    /// so their neighbor mean is the zero vector.
    pub fn mean_adjacency(graph: &Graph) -> Self {
        let n = graph.num_nodes();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(2 * graph.num_edges());
        let mut values = Vec::with_capacity(2 * graph.num_edges());
        indptr.push(0);
        for i in 0..n {
            let nbrs = graph.neighbors(i);
            let w = if nbrs.is_empty() { 0.0 } else { 1.0 / nbrs.len() as f64 };
            for &j in nbrs {
                indices.push(j);
                values.push(w);
            }
            indptr.push(indices.len());
        }
        Self { rows: n, cols: n, indptr, indices, values }
    }

    /// Binary adjacency `A`.
    pub fn adjacency(graph: &Graph) -> Self {
        let n = graph.num_nodes();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(2 * graph.num_edges());
        indptr.push(0);
        for i in 0..n {
            indices.extend_from_slice(graph.neighbors(i));
            indptr.push(indices.len());
        }
        let values = vec![1.0; indices.len()];
        Self { rows: n, cols: n, indptr, indices, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.rows as f64 * self.cols as f64)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    /// `self * rhs`.
    pub fn dot(&self, rhs: &ArrayView2<'_, f64>) -> Array2<f64> {
        assert_eq!(self.cols, rhs.nrows(), "sparse product shape mismatch");
        let mut out = Array2::zeros((self.rows, rhs.ncols()));
        for (i, mut out_row) in out.rows_mut().into_iter().enumerate() {
            for (j, v) in self.row(i) {
                out_row.scaled_add(v, &rhs.row(j));
            }
        }
        out
    }

    /// `self^T * rhs`.
    pub fn t_dot(&self, rhs: &ArrayView2<'_, f64>) -> Array2<f64> {
        assert_eq!(self.rows, rhs.nrows(), "sparse product shape mismatch");
        let mut out = Array2::zeros((self.cols, rhs.ncols()));
        for i in 0..self.rows {
            let src = rhs.row(i);
            for (j, v) in self.row(i) {
                out.row_mut(j).scaled_add(v, &src);
            }
        }
        out
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows, self.cols));
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                out[[i, j]] += v;
            }
        }
        out
    }
}
