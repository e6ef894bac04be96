//! Dense cubical tensors of order `m` and dimension `n`.
//!
//! Entries are stored row-major over multi-indices `(i1, ..., im)`, so the
//! first index is the slowest. All products sum in ascending multi-index
//! order, which keeps results bit-reproducible across runs and threads.

mod classify;
mod spectral;

pub use classify::{certifies, classify, s_tensor_certificate, shared_certificate, ClassifyOptions, TensorClassReport};
pub use spectral::{spectral_radius_nonneg, SpectralEstimate, SpectralOptions};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("invalid shape: order {order} (needs >= 2), dim {dim} (needs >= 1)")]
    InvalidShape { order: usize, dim: usize },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("tensor has a negative entry {value} at flat offset {index}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("negative base {base} raised to fractional power {power}")]
    NegativeBase { base: f64, power: f64 },
    #[error("tensor literal must give exactly one of `entries` and `nonzeros`")]
    AmbiguousLiteral,
    #[error("power iteration did not converge after {iterations} iterations, bracket [{lower}, {upper}]")]
    NoConvergence { lower: f64, upper: f64, iterations: usize },
}

/// A dense order-`m`, dimension-`n` real tensor.
///
/// Deserializes from either the dense literal
/// `{"order", "dim", "entries"}` or the sparse literal
/// `{"order", "dim", "nonzeros": [{"idx": [1-based], "val"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::io::TensorLiteral")]
pub struct CubicalTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl CubicalTensor {
    pub fn new(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self, TensorError> {
        if order < 2 || dim < 1 {
            return Err(TensorError::InvalidShape { order, dim });
        }
        let expected = dim.pow(order as u32);
        if entries.len() != expected {
            return Err(TensorError::LengthMismatch { expected, got: entries.len() });
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite { index });
        }
        Ok(Self { order, dim, entries })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self, TensorError> {
        if order < 2 || dim < 1 {
            return Err(TensorError::InvalidShape { order, dim });
        }
        Self::new(order, dim, vec![0.0; dim.pow(order as u32)])
    }

    /// Builds a tensor by evaluating `f` at every multi-index (0-based).
    pub fn from_fn<F>(order: usize, dim: usize, mut f: F) -> Result<Self, TensorError>
    where
        F: FnMut(&[usize]) -> f64,
    {
        if order < 2 || dim < 1 {
            return Err(TensorError::InvalidShape { order, dim });
        }
        let entries = MultiIndices::new(order, dim).map(|idx| f(&idx)).collect();
        Self::new(order, dim, entries)
    }

    /// The identity tensor: ones on the full diagonal, zero elsewhere.
    pub fn identity(order: usize, dim: usize) -> Result<Self, TensorError> {
        Self::from_fn(order, dim, |idx| if is_diagonal(idx) { 1.0 } else { 0.0 })
    }

    /// Diagonal tensor with the given diagonal.
    pub fn diagonal_from(order: usize, diag: &[f64]) -> Result<Self, TensorError> {
        Self::from_fn(order, diag.len(), |idx| if is_diagonal(idx) { diag[idx[0]] } else { 0.0 })
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self, TensorError> {
        if m.nrows() != m.ncols() {
            return Err(TensorError::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        Self::from_fn(2, m.nrows(), |idx| m[(idx[0], idx[1])])
    }

    pub fn to_matrix(&self) -> Option<DMatrix<f64>> {
        (self.order == 2).then(|| DMatrix::from_row_slice(self.dim, self.dim, &self.entries))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Number of entries in one row slice `A[i, ..]`.
    pub fn row_len(&self) -> usize {
        self.dim.pow(self.order as u32 - 1)
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.entries[self.offset(idx)]
    }

    /// Returns a copy with one entry replaced.
    pub fn with_entry(&self, idx: &[usize], value: f64) -> Result<Self, TensorError> {
        if idx.len() != self.order {
            return Err(TensorError::DimensionMismatch { expected: self.order, got: idx.len() });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(TensorError::IndexOutOfRange { index: bad, dim: self.dim });
        }
        let mut entries = self.entries.clone();
        entries[self.offset(idx)] = value;
        Self::new(self.order, self.dim, entries)
    }

    pub fn multi_indices(&self) -> MultiIndices {
        MultiIndices::new(self.order, self.dim)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.entries[self.diag_offset(i)]).collect()
    }

    fn diag_offset(&self, i: usize) -> usize {
        // sum_{p} i * n^p
        let mut off = 0;
        for _ in 0..self.order {
            off = off * self.dim + i;
        }
        off
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|&v| v >= 0.0)
    }

    /// Entrywise map. Fails if `f` produces a non-finite value.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self, TensorError> {
        Self::new(self.order, self.dim, self.entries.iter().map(|&v| f(v)).collect())
    }

    /// Entrywise map with access to the multi-index.
    pub fn map_indexed<F: Fn(&[usize], f64) -> f64>(&self, f: F) -> Result<Self, TensorError> {
        let entries = self
            .multi_indices()
            .zip(self.entries.iter())
            .map(|(idx, &v)| f(&idx, v))
            .collect();
        Self::new(self.order, self.dim, entries)
    }

    pub fn scale(&self, s: f64) -> Result<Self, TensorError> {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self::new(self.order, self.dim, entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Self::new(self.order, self.dim, entries)
    }

    /// Multiplies row `j` (all entries with first index `j`) by `s[j]`.
    pub fn scale_rows(&self, s: &[f64]) -> Result<Self, TensorError> {
        self.check_vec(s)?;
        let row_len = self.row_len();
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, &v)| v * s[k / row_len])
            .collect();
        Self::new(self.order, self.dim, entries)
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.order != other.order {
            return Err(TensorError::DimensionMismatch { expected: self.order, got: other.order });
        }
        if self.dim != other.dim {
            return Err(TensorError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    fn check_vec(&self, x: &[f64]) -> Result<(), TensorError> {
        if x.len() != self.dim {
            return Err(TensorError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// The contraction `(A x^{m-1})_i = sum A[i, i2, .., im] x[i2] ... x[im]`.
    pub fn tvp(&self, x: &[f64]) -> Result<Vec<f64>, TensorError> {
        self.check_vec(x)?;
        let tail = outer_power(x, self.order - 1);
        let row_len = tail.len();
        Ok(self
            .entries
            .chunks_exact(row_len)
            .map(|row| row.iter().zip(&tail).fold(0.0, |acc, (a, p)| acc + a * p))
            .collect())
    }

    /// Jacobian of `x -> A x^{m-1}`.
    ///
    /// `M[i][j] = sum_p sum A[i, .., j at position p, ..] prod_{q != p} x[i_q]`.
    pub fn tvp_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>, TensorError> {
        self.check_vec(x)?;
        let n = self.dim;
        let k = self.order - 1;
        let mut jac = DMatrix::zeros(n, n);
        let row_len = self.row_len();
        let mut tail = vec![0usize; k];
        for t in 0..row_len {
            decode(t, n, &mut tail);
            for p in 0..k {
                let others: f64 = tail
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != p)
                    .map(|(_, &iq)| x[iq])
                    .product();
                let col = tail[p];
                for i in 0..n {
                    let a = self.entries[i * row_len + t];
                    if a != 0.0 {
                        jac[(i, col)] += a * others;
                    }
                }
            }
        }
        Ok(jac)
    }

    /// The comparison tensor: `|diagonal|`, `-|off-diagonal|`.
    pub fn comparison(&self) -> Self {
        let entries = self
            .multi_indices()
            .zip(&self.entries)
            .map(|(idx, &v)| if is_diagonal(&idx) { v.abs() } else { -v.abs() })
            .collect();
        Self { order: self.order, dim: self.dim, entries }
    }

    /// Sums of nonnegative and of |negative| off-diagonal entries of row `i`.
    pub fn row_sums(&self, i: usize) -> Result<RowSums, TensorError> {
        if i >= self.dim {
            return Err(TensorError::IndexOutOfRange { index: i, dim: self.dim });
        }
        let row_len = self.row_len();
        let diag_in_row = self.diag_offset(i) - i * row_len;
        let mut sums = RowSums::default();
        for (t, &v) in self.entries[i * row_len..(i + 1) * row_len].iter().enumerate() {
            if t == diag_in_row {
                continue;
            }
            if v >= 0.0 {
                sums.plus += v;
            } else {
                sums.minus += -v;
            }
        }
        Ok(sums)
    }

    /// Sum of |off-diagonal| entries of row `i`.
    pub fn off_diagonal_abs_sum(&self, i: usize) -> f64 {
        self.row_sums(i).map(|s| s.plus + s.minus).unwrap_or(0.0)
    }

    pub fn is_metzler(&self) -> bool {
        self.multi_indices().zip(&self.entries).all(|(idx, &v)| is_diagonal(&idx) || v >= 0.0)
    }

    /// Z-pattern: every off-diagonal entry is nonpositive.
    pub fn has_nonpositive_off_diagonal(&self) -> bool {
        self.multi_indices().zip(&self.entries).all(|(idx, &v)| is_diagonal(&idx) || v <= 0.0)
    }

    /// Strong connectivity of the support digraph, with an edge `j -> i`
    /// whenever an off-diagonal entry `A[i, .., j, ..]` is nonzero.
    pub fn is_irreducible(&self) -> bool {
        let n = self.dim;
        if n == 1 {
            return true;
        }
        let mut adj = vec![vec![false; n]; n]; // adj[j][i]: edge j -> i
        let row_len = self.row_len();
        let mut tail = vec![0usize; self.order - 1];
        for i in 0..n {
            for t in 0..row_len {
                if self.entries[i * row_len + t] == 0.0 {
                    continue;
                }
                decode(t, n, &mut tail);
                if tail.iter().all(|&j| j == i) {
                    continue;
                }
                for &j in &tail {
                    if j != i {
                        adj[j][i] = true;
                    }
                }
            }
        }
        strongly_connected(&adj)
    }
}

/// Positive and negative off-diagonal row sums.
#[derive(Debug, Default, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowSums {
    pub plus: f64,
    pub minus: f64,
}

pub fn is_diagonal(idx: &[usize]) -> bool {
    idx.iter().all(|&i| i == idx[0])
}

/// Componentwise power. Negative bases are allowed only for integer powers.
pub fn hadamard_power(x: &[f64], p: f64) -> Result<Vec<f64>, TensorError> {
    let integral = p.fract() == 0.0;
    x.iter()
        .map(|&v| {
            if v < 0.0 && !integral {
                Err(TensorError::NegativeBase { base: v, power: p })
            } else if integral && p.abs() < i32::MAX as f64 {
                Ok(v.powi(p as i32))
            } else {
                Ok(v.powf(p))
            }
        })
        .collect()
}

/// Kronecker power `x ⊗ ... ⊗ x` (`k` factors), indexed like a tensor row tail.
fn outer_power(x: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * x.len());
        for &a in &out {
            for &b in x {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

fn decode(mut t: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = t % n;
        t /= n;
    }
}

fn strongly_connected(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let edge = if forward { adj[u][v] } else { adj[v][u] };
                if edge && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    reach(true) && reach(false)
}

/// Iterator over all multi-indices of a cubical shape in row-major order.
#[derive(Debug, Clone)]
pub struct MultiIndices {
    dim: usize,
    current: Vec<usize>,
    done: bool,
}

impl MultiIndices {
    pub fn new(order: usize, dim: usize) -> Self {
        Self { dim, current: vec![0; order], done: dim == 0 }
    }
}

impl Iterator for MultiIndices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut p = self.current.len();
        loop {
            if p == 0 {
                self.done = true;
                break;
            }
            p -= 1;
            self.current[p] += 1;
            if self.current[p] < self.dim {
                break;
            }
            self.current[p] = 0;
        }
        Some(out)
    }
}
