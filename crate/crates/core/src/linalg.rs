//! Dense vector helpers and the two matrix layouts used by the problem oracles.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Inner product with four independent accumulators.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `a + s * (b - c)`, the extrapolation shape used throughout the solvers.
pub fn extrapolate(a: &[f64], s: f64, b: &[f64], c: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b.iter().zip(c))
        .map(|(x, (y, z))| x + s * (y - z))
        .collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim(cols, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Compressed sparse row matrix with 0-based, strictly increasing column indices per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        offsets: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_dim(rows + 1, offsets.len())?;
        check_dim(indices.len(), values.len())?;
        if offsets[0] != 0 || offsets[rows] != indices.len() {
            return Err(Error::InvalidParameter(
                "row offsets must start at 0 and end at nnz".into(),
            ));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "row offsets must be monotone".into(),
            ));
        }
        for r in 0..rows {
            let idx = &indices[offsets[r]..offsets[r + 1]];
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "column indices of row {r} are not strictly increasing"
                )));
            }
            if idx.last().is_some_and(|&c| c >= cols) {
                return Err(Error::InvalidParameter(format!(
                    "column index out of range in row {r}"
                )));
            }
        }
        Ok(Self {
            rows,
            cols,
            offsets,
            indices,
            values,
        })
    }

    /// Builds a CSR matrix from per-row `(column, value)` lists; entries are sorted per row.
    pub fn from_row_entries(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        let nrows = rows.len();
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                indices.push(c);
                values.push(v);
            }
            offsets.push(indices.len());
        }
        Self::new(nrows, cols, offsets, indices, values)
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        (&self.indices[s..e], &self.values[s..e])
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                d.set(i, j, v);
            }
        }
        d
    }
}

/// Either storage layout; all oracle code goes through this type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows,
            Matrix::Sparse(m) => m.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.cols,
            Matrix::Sparse(m) => m.cols,
        }
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols());
        match self {
            Matrix::Dense(m) => (0..m.rows).map(|i| dot(m.row(i), x)).collect(),
            Matrix::Sparse(m) => (0..m.rows)
                .map(|i| {
                    let (idx, val) = m.row(i);
                    idx.iter().zip(val).map(|(&j, &v)| v * x[j]).sum()
                })
                .collect(),
        }
    }

    /// `Aᵀ y`, accumulated row by row in a single pass.
    pub fn mul_vec_t(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows());
        let mut out = vec![0.0; self.cols()];
        match self {
            Matrix::Dense(m) => {
                for (i, &yi) in y.iter().enumerate() {
                    if yi == 0.0 {
                        continue;
                    }
                    for (o, &a) in out.iter_mut().zip(m.row(i)) {
                        *o += a * yi;
                    }
                }
            }
            Matrix::Sparse(m) => {
                for (i, &yi) in y.iter().enumerate() {
                    let (idx, val) = m.row(i);
                    for (&j, &v) in idx.iter().zip(val) {
                        out[j] += v * yi;
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        match self {
            Matrix::Dense(m) => m.data.iter().map(|v| v * v).sum(),
            Matrix::Sparse(m) => m.values.iter().map(|v| v * v).sum(),
        }
    }

    pub fn min_entry(&self) -> f64 {
        let explicit = match self {
            Matrix::Dense(m) => m.data.iter().copied().fold(f64::INFINITY, f64::min),
            Matrix::Sparse(m) => m.values.iter().copied().fold(f64::INFINITY, f64::min),
        };
        match self {
            Matrix::Sparse(m) if m.nnz() < m.rows * m.cols => explicit.min(0.0),
            _ => explicit,
        }
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.mul_vec_t(&vec![1.0; self.rows()])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => m.clone(),
            Matrix::Sparse(m) => m.to_dense(),
        }
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<SparseMatrix> for Matrix {
    fn from(m: SparseMatrix) -> Self {
        Matrix::Sparse(m)
    }
}

/// Result of a power iteration on `AᵀA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest eigenvalue of `AᵀA` by power iteration from the all-ones direction.
///
/// Stops when the relative change of the Rayleigh quotient drops below `tol`.
pub fn max_eig_gram(a: &Matrix, tol: f64, max_iter: usize) -> SpectralEstimate {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return SpectralEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    // A slightly non-uniform start avoids being orthogonal to the top eigenvector
    // for symmetric designs.
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 1e-3 * (i as f64 + 1.0).sqrt())
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let w = a.mul_vec_t(&a.mul_vec(&v));
        let next = dot(&v, &w);
        let nw = norm2(&w);
        if nw == 0.0 {
            return SpectralEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            };
        }
        v = w.into_iter().map(|x| x / nw).collect();
        if it > 1 && (next - lambda).abs() <= tol * next.abs().max(f64::MIN_POSITIVE) {
            return SpectralEstimate {
                value: next,
                iterations: it,
                converged: true,
            };
        }
        lambda = next;
    }
    SpectralEstimate {
        value: lambda,
        iterations: max_iter,
        converged: false,
    }
}
