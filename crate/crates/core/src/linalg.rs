//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Largest size evaluated by exact cofactor expansion.
pub const EXACT_MINOR_LIMIT: usize = 8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinorReport {
    /// `minors[k]` is the determinant of the leading `(k+1) x (k+1)` block.
    pub minors: Vec<f64>,
    pub all_positive: bool,
    /// False when some minor above the exact limit came from a factorization.
    pub exact: bool,
    pub ill_conditioned: bool,
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant_exact(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    if n == 0 {
        return 1.0;
    }
    let cols: Vec<usize> = (0..n).collect();
    expand(m, 0, &cols)
}

fn expand(m: &DMatrix<f64>, row: usize, cols: &[usize]) -> f64 {
    if cols.len() == 1 {
        return m[(row, cols[0])];
    }
    if cols.len() == 2 {
        return m[(row, cols[0])] * m[(row + 1, cols[1])] - m[(row, cols[1])] * m[(row + 1, cols[0])];
    }
    let mut det = 0.0;
    for (k, &c) in cols.iter().enumerate() {
        let a = m[(row, c)];
        if a == 0.0 {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * a * expand(m, row + 1, &rest);
    }
    det
}

/// Leading principal minors, exact up to [`EXACT_MINOR_LIMIT`], pivoted LU above.
pub fn leading_principal_minors(m: &DMatrix<f64>) -> MinorReport {
    let n = m.nrows();
    let mut minors = Vec::with_capacity(n);
    let mut ill_conditioned = false;
    for k in 1..=n {
        let block = m.view((0, 0), (k, k)).into_owned();
        if k <= EXACT_MINOR_LIMIT {
            minors.push(determinant_exact(&block));
        } else {
            let lu = block.lu();
            let u = lu.u();
            let diag: Vec<f64> = u.diagonal().iter().map(|v| v.abs()).collect();
            let hi = diag.iter().cloned().fold(0.0, f64::max);
            let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
            if lo == 0.0 || hi / lo > 1e12 {
                ill_conditioned = true;
            }
            minors.push(lu.determinant());
        }
    }
    MinorReport {
        all_positive: minors.iter().all(|&d| d > 0.0),
        minors,
        exact: n <= EXACT_MINOR_LIMIT,
        ill_conditioned,
    }
}

/// Solves `m x = b` by LU; `None` when singular.
pub fn solve(m: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    let x = m.clone().lu().solve(&rhs)?;
    x.iter().all(|v| v.is_finite()).then(|| x.iter().copied().collect())
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut eigs: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    eigs
}

pub fn spectral_abscissa(eigs: &[Complex<f64>]) -> f64 {
    eigs.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
}

pub fn is_metzler(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] >= 0.0))
}

/// Irreducibility of a square matrix via strong connectivity of its support.
pub fn is_irreducible(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    if n <= 1 {
        return true;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if forward { m[(i, j)] } else { m[(j, i)] };
                if j != i && w != 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

pub fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn inf_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}
