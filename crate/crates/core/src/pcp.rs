//! Quadratic complementarity problems
//! `x >= 0, Bx^2 + Ax + q >= 0, x^T (Bx^2 + Ax + q) = 0`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::matrix_rows;
use crate::linalg::{inf_dist, inf_norm};
use crate::model::LvModel;
use crate::tensor::{CubicalTensor, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcpError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("B must have order 3, got {0}")]
    NotCubic(usize),
    #[error("A is {rows}x{cols}, expected {n}x{n}")]
    MatrixShape { rows: usize, cols: usize, n: usize },
    #[error("q has length {got}, expected {expected}")]
    RhsLength { expected: usize, got: usize },
    #[error("{which} fails generalized row strict diagonal dominance with positive diagonal at row {row}")]
    NotGeneralizedSdd { which: &'static str, row: usize },
    #[error("q has no negative component")]
    NonNegativeQ,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemFile", into = "ProblemFile")]
pub struct QcpProblem {
    b: CubicalTensor,
    a: DMatrix<f64>,
    q: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(rename = "B")]
    pub b: CubicalTensor,
    #[serde(rename = "A", with = "matrix_rows")]
    pub a: DMatrix<f64>,
    pub q: Vec<f64>,
}

impl TryFrom<ProblemFile> for QcpProblem {
    type Error = PcpError;

    fn try_from(f: ProblemFile) -> Result<Self, Self::Error> {
        QcpProblem::new(f.b, f.a, f.q)
    }
}

impl From<QcpProblem> for ProblemFile {
    fn from(p: QcpProblem) -> Self {
        ProblemFile { b: p.b, a: p.a, q: p.q }
    }
}

impl QcpProblem {
    pub fn new(b: CubicalTensor, a: DMatrix<f64>, q: Vec<f64>) -> Result<Self, PcpError> {
        if b.order() != 3 {
            return Err(PcpError::NotCubic(b.order()));
        }
        let n = b.dim();
        if a.nrows() != n || a.ncols() != n {
            return Err(PcpError::MatrixShape { rows: a.nrows(), cols: a.ncols(), n });
        }
        if q.len() != n {
            return Err(PcpError::RhsLength { expected: n, got: q.len() });
        }
        Ok(Self { b, a, q })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn b(&self) -> &CubicalTensor {
        &self.b
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn with_q(&self, q: Vec<f64>) -> Result<Self, PcpError> {
        Self::new(self.b.clone(), self.a.clone(), q)
    }

    /// `F(x) = Ax + Bx^2`.
    pub fn f(&self, x: &[f64]) -> Vec<f64> {
        let ax = &self.a * DVector::from_column_slice(x);
        let bx = self.b.tvp(x).expect("dim");
        ax.iter().zip(bx).map(|(u, v)| u + v).collect()
    }

    pub fn slack(&self, x: &[f64]) -> Vec<f64> {
        self.f(x).iter().zip(&self.q).map(|(f, q)| f + q).collect()
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        &self.a + self.b.tvp_jacobian(x).expect("dim")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcpSolution {
    pub x: Vec<f64>,
    pub slack: Vec<f64>,
    pub support: Vec<usize>,
}

/// Independent check of the three complementarity conditions.
pub fn verify(problem: &QcpProblem, x: &[f64], tol: f64) -> bool {
    let slack = problem.slack(x);
    let scale = 1.0 + inf_norm(x);
    x.iter().all(|&v| v >= 0.0)
        && slack.iter().all(|&s| s >= -tol * scale)
        && x.iter().zip(&slack).map(|(a, b)| a * b).sum::<f64>().abs() < tol * scale * scale
        && x.iter().zip(&slack).all(|(&xi, &si)| xi == 0.0 || si.abs() < tol * scale)
}

/// Indices with `q_i < 0`.
pub fn omega(q: &[f64]) -> Vec<usize> {
    q.iter().enumerate().filter(|(_, &v)| v < 0.0).map(|(i, _)| i).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: usize,
    pub s_a: f64,
    pub s_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
    pub per_index: Vec<BoundRow>,
}

fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    // root of a s^2 + b s + c = 0 with a > 0, c < 0, in a cancellation-free form
    let disc = (b * b - 4.0 * a * c).sqrt();
    if b >= 0.0 {
        -2.0 * c / (b + disc)
    } else {
        (-b + disc) / (2.0 * a)
    }
}

fn matrix_as_tensor(a: &DMatrix<f64>) -> CubicalTensor {
    CubicalTensor::from_matrix(a).expect("square finite matrix")
}

/// Infinity-norm bounds on every solution, valid when `B` and `A` are
/// generalized row strictly diagonally dominant with positive diagonal and
/// `q` has a negative component.
///
/// With `s(.)_k = diag + r_k(.)_+` and `delta(.)_k = diag - r_k(.)_-`:
/// `lower = min_k root(s(B)_k, s(A)_k, q_k)`,
/// `upper = max_k root(delta(B)_k, delta(A)_k, q_k)` over `k` with `q_k < 0`.
pub fn norm_bounds(problem: &QcpProblem) -> Result<NormBounds, PcpError> {
    let a = matrix_as_tensor(&problem.a);
    for (which, t) in [("B", &problem.b), ("A", &a)] {
        for row in 0..problem.dim() {
            let d = t.get(&vec![row; t.order()]);
            let rs = t.row_sums(row)?;
            if !(d > 0.0 && d - rs.minus > 0.0) {
                return Err(PcpError::NotGeneralizedSdd { which, row });
            }
        }
    }
    let ks = omega(&problem.q);
    if ks.is_empty() {
        return Err(PcpError::NonNegativeQ);
    }
    let mut per_index = Vec::new();
    for k in ks {
        let rb = problem.b.row_sums(k)?;
        let ra = a.row_sums(k)?;
        let (db, da) = (problem.b.get(&[k, k, k]), problem.a[(k, k)]);
        let (s_b, s_a) = (db + rb.plus, da + ra.plus);
        let (delta_b, delta_a) = (db - rb.minus, da - ra.minus);
        let qk = problem.q[k];
        per_index.push(BoundRow {
            k,
            s_a,
            s_b,
            delta_a,
            delta_b,
            lower: positive_root(s_b, s_a, qk),
            upper: positive_root(delta_b, delta_a, qk),
        });
    }
    Ok(NormBounds {
        lower: per_index.iter().map(|r| r.lower).fold(f64::INFINITY, f64::min),
        upper: per_index.iter().map(|r| r.upper).fold(f64::NEG_INFINITY, f64::max),
        per_index,
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnumerationOptions {
    pub tol: f64,
    /// Random Newton starts per support, on top of the `|S|` vertices and the centroid.
    pub newton_starts: Option<usize>,
    pub seed: u64,
    pub dedup_radius: f64,
    pub max_newton_iter: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { tol: 1e-9, newton_starts: None, seed: 0, dedup_radius: 1e-6, max_newton_iter: 100 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportOutcome {
    pub support: Vec<usize>,
    /// Distinct roots of the restricted square system with positive support.
    pub roots: usize,
    /// Roots that are also complementarity solutions.
    pub accepted: usize,
    /// Every start hit a singular restricted Jacobian.
    pub undetermined: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Enumeration {
    pub solutions: Vec<PcpSolution>,
    pub supports: Vec<SupportOutcome>,
}

fn support_of(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

fn embed(support: &[usize], y: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (&i, &v) in support.iter().zip(y) {
        x[i] = v;
    }
    x
}

/// Rough magnitude of the roots, used to place the Newton starts.
fn root_scale(problem: &QcpProblem) -> f64 {
    let n = problem.dim();
    let mut scale: f64 = 1.0;
    for i in 0..n {
        let q = problem.q[i].abs();
        let a = problem.a[(i, i)].abs();
        let b = problem.b.get(&[i, i, i]).abs();
        if b > 0.0 {
            scale = scale.max(positive_root(b, a, -q.max(1e-300)));
        } else if a > 0.0 {
            scale = scale.max(q / a);
        }
    }
    scale
}

enum NewtonOutcome {
    Root(Vec<f64>),
    Singular,
    Failed,
}

fn restricted_newton(problem: &QcpProblem, support: &[usize], y0: Vec<f64>, opts: &EnumerationOptions) -> NewtonOutcome {
    let n = problem.dim();
    let s = support.len();
    let residual = |y: &[f64]| -> Vec<f64> {
        let slack = problem.slack(&embed(support, y, n));
        support.iter().map(|&i| slack[i]).collect()
    };
    let mut y = y0;
    let mut r = residual(&y);
    let mut rn = inf_norm(&r);
    for _ in 0..opts.max_newton_iter {
        let scale = 1.0 + inf_norm(&y);
        if rn < 1e-13 * scale * scale {
            return NewtonOutcome::Root(y);
        }
        let full = problem.jacobian(&embed(support, &y, n));
        let jac = DMatrix::from_fn(s, s, |a, b| full[(support[a], support[b])]);
        let rhs = DVector::from_iterator(s, r.iter().map(|v| -v));
        let Some(step) = jac.lu().solve(&rhs) else {
            return NewtonOutcome::Singular;
        };
        if step.iter().any(|v| !v.is_finite()) {
            return NewtonOutcome::Singular;
        }
        let mut lambda = 1.0;
        let mut moved = false;
        while lambda >= 2f64.powi(-20) {
            let cand: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| a + lambda * d).collect();
            let rc = residual(&cand);
            let rcn = inf_norm(&rc);
            if rcn < rn {
                y = cand;
                r = rc;
                rn = rcn;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let scale = 1.0 + inf_norm(&y);
    if rn < 1e-10 * scale * scale {
        NewtonOutcome::Root(y)
    } else {
        NewtonOutcome::Failed
    }
}

fn single_support_roots(problem: &QcpProblem, i: usize) -> Vec<f64> {
    // B_iii x^2 + A_ii x + q_i = 0
    let (a, b, c) = (problem.b.get(&[i, i, i]), problem.a[(i, i)], problem.q[i]);
    if a == 0.0 {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = if q == 0.0 { vec![0.0] } else { vec![q / a, c / q] };
    roots.dedup();
    roots
}

fn solve_support(problem: &QcpProblem, mask: usize, opts: &EnumerationOptions) -> (SupportOutcome, Vec<PcpSolution>) {
    let n = problem.dim();
    let support = support_of(mask, n);
    let s = support.len();
    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut undetermined = false;

    if s == 1 {
        roots = single_support_roots(problem, support[0]).into_iter().map(|r| vec![r]).collect();
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(mask as u64);
        let scale = root_scale(problem);
        let mut starts: Vec<Vec<f64>> = Vec::new();
        for k in 0..s {
            starts.push((0..s).map(|j| if j == k { scale } else { 0.1 * scale }).collect());
        }
        starts.push(vec![scale / s as f64; s]);
        for _ in 0..opts.newton_starts.unwrap_or(s) {
            starts.push((0..s).map(|_| scale * rng.random_range(0.01..2.0)).collect());
        }
        let n_starts = starts.len();
        let mut singular = 0;
        for start in starts {
            let mut y0 = start;
            for attempt in 0..3 {
                match restricted_newton(problem, &support, y0.clone(), opts) {
                    NewtonOutcome::Root(y) => {
                        roots.push(y);
                        break;
                    }
                    NewtonOutcome::Singular if attempt < 2 => {
                        y0.iter_mut().for_each(|v| *v *= 1.0 + rng.random_range(-0.3..0.3));
                    }
                    NewtonOutcome::Singular => singular += 1,
                    NewtonOutcome::Failed => break,
                }
            }
        }
        undetermined = singular == n_starts && roots.is_empty();
    }

    let mut positive: Vec<Vec<f64>> = Vec::new();
    for y in roots {
        if y.iter().all(|&v| v > opts.tol) && !positive.iter().any(|p| inf_dist(p, &y) < opts.dedup_radius) {
            positive.push(y);
        }
    }
    let roots: Vec<PcpSolution> = positive
        .iter()
        .map(|y| {
            let x = embed(&support, y, n);
            PcpSolution { slack: problem.slack(&x), x, support: support.clone() }
        })
        .collect();
    let accepted = roots.iter().filter(|r| off_support_ok(r, opts.tol)).count();
    let outcome = SupportOutcome { support, roots: roots.len(), accepted, undetermined };
    (outcome, roots)
}

fn off_support_ok(root: &PcpSolution, tol: f64) -> bool {
    let scale = 1.0 + inf_norm(&root.x);
    root.x.iter().zip(&root.slack).all(|(&x, &s)| x > 0.0 || s >= -tol * scale)
}

fn enumerate(problem: &QcpProblem, opts: &EnumerationOptions) -> Vec<(SupportOutcome, Vec<PcpSolution>)> {
    let n = problem.dim();
    assert!(n <= 20, "support enumeration is exponential in n");
    (1..1usize << n).into_par_iter().map(|mask| solve_support(problem, mask, opts)).collect()
}

/// Every root of `(F(x) + q)_S = 0, x_{S^c} = 0` with `x_S > 0`, over all
/// nonempty supports `S`, whatever the sign of the off-support slack.
pub fn support_roots(problem: &QcpProblem, opts: &EnumerationOptions) -> Vec<PcpSolution> {
    enumerate(problem, opts).into_iter().flat_map(|(_, roots)| roots).collect()
}

/// Enumerates every support `S`, solving `(F(x) + q)_S = 0` with
/// `x_{S^c} = 0` by multistart damped Newton, and keeps the roots with
/// `x_S > 0` and nonnegative off-support slack.
///
/// Supports run in parallel; results are merged in mask order so the output
/// is independent of scheduling.
pub fn brute_force_solve(problem: &QcpProblem, opts: &EnumerationOptions) -> Enumeration {
    let n = problem.dim();
    let mut supports = Vec::with_capacity(1 << n);
    let mut solutions = Vec::new();
    if problem.q.iter().all(|&v| v >= 0.0) {
        solutions.push(PcpSolution { x: vec![0.0; n], slack: problem.q.clone(), support: Vec::new() });
    }
    supports.push(SupportOutcome {
        support: Vec::new(),
        roots: 1,
        accepted: solutions.len(),
        undetermined: false,
    });
    for (outcome, roots) in enumerate(problem, opts) {
        supports.push(outcome);
        for s in roots.into_iter().filter(|r| off_support_ok(r, opts.tol)) {
            if !solutions.iter().any(|p: &PcpSolution| inf_dist(&p.x, &s.x) < opts.dedup_radius) {
                solutions.push(s);
            }
        }
    }
    Enumeration { solutions, supports }
}

/// Whether `x = 0` is the only solution of `x >= 0, Bx^2 >= 0, x^T Bx^2 = 0`.
///
/// By homogeneity it suffices to look for solutions on the simplex; each
/// support is searched by Gauss-Newton on `(Bx^2)_S = 0, sum x_S = 1`.
pub fn leading_sol_zero(b: &CubicalTensor, tol: f64) -> bool {
    let n = b.dim();
    !(1..1usize << n).into_par_iter().any(|mask| simplex_solution(b, mask, tol).is_some())
}

fn simplex_solution(b: &CubicalTensor, mask: usize, tol: f64) -> Option<Vec<f64>> {
    let n = b.dim();
    let support = support_of(mask, n);
    let s = support.len();
    let residual = |y: &[f64]| -> Vec<f64> {
        let v = b.tvp(&embed(&support, y, n)).expect("dim");
        let mut r: Vec<f64> = support.iter().map(|&i| v[i]).collect();
        r.push(y.iter().sum::<f64>() - 1.0);
        r
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    rng.set_stream(mask as u64);
    let mut starts: Vec<Vec<f64>> = (0..s)
        .map(|k| (0..s).map(|j| if j == k { 0.8 } else { 0.2 / s as f64 }).collect())
        .collect();
    starts.push(vec![1.0 / s as f64; s]);
    for _ in 0..s {
        starts.push((0..s).map(|_| rng.random_range(0.01..1.0)).collect());
    }
    for start in starts {
        let mut y = start;
        let mut r = residual(&y);
        let mut mu = 1e-3;
        for _ in 0..200 {
            let x = embed(&support, &y, n);
            let full = b.tvp_jacobian(&x).expect("dim");
            let jac = DMatrix::from_fn(s + 1, s, |a, c| if a < s { full[(support[a], support[c])] } else { 1.0 });
            let rv = DVector::from_column_slice(&r);
            let jt = jac.transpose();
            let lhs = &jt * &jac + DMatrix::identity(s, s) * mu;
            let Some(step) = lhs.lu().solve(&(-(&jt * rv))) else { break };
            let cand: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| (a + d).max(0.0)).collect();
            let rc = residual(&cand);
            if inf_norm(&rc) < inf_norm(&r) {
                y = cand;
                r = rc;
                mu = (mu * 0.3).max(1e-12);
            } else {
                mu *= 10.0;
                if mu > 1e8 {
                    break;
                }
            }
            if inf_norm(&r) < 1e-13 {
                break;
            }
        }
        if inf_norm(&r) < tol && y.iter().all(|&v| v > tol) {
            let x = embed(&support, &y, n);
            let v = b.tvp(&x).expect("dim");
            if (0..n).filter(|i| mask >> i & 1 == 0).all(|i| v[i] >= -tol) {
                return Some(x);
            }
        }
    }
    None
}

/// Number of distinct solutions for each `q`, an empirical stand-in for
/// the global uniqueness property.
pub fn solution_counts(problem: &QcpProblem, qs: &[Vec<f64>], opts: &EnumerationOptions) -> Result<Vec<usize>, PcpError> {
    qs.iter()
        .map(|q| Ok(brute_force_solve(&problem.with_q(q.clone())?, opts).solutions.len()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Equilibria with `1 + Ax + Bx^2 <= 0`: `SOL(-Ax - Bx^2, -1)`.
    StableSide,
    /// Equilibria with `1 + Ax + Bx^2 >= 0`: `SOL(Ax + Bx^2, 1)`.
    UnstableSide,
}

pub fn lv_to_pcp(model: &LvModel, orientation: Orientation) -> QcpProblem {
    let n = model.dim();
    let (b, a, q) = match orientation {
        Orientation::StableSide => (model.b().scale(-1.0).expect("finite"), -model.a(), vec![-1.0; n]),
        Orientation::UnstableSide => (model.b().clone(), model.a().clone(), vec![1.0; n]),
    };
    QcpProblem::new(b, a, q).expect("model shapes are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::fixtures::{symmetric_system, skewed_system};

    fn symmetric_problem() -> QcpProblem {
        let s = symmetric_system();
        let a = s.terms()[0].to_matrix().unwrap();
        QcpProblem::new(s.terms()[1].clone(), a, vec![-1.0, -1.0]).unwrap()
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(&[-1.0, -1.0]), vec![0, 1]);
        assert_eq!(omega(&[1.0, 0.0, -2.0]), vec![2]);
        assert!(omega(&[0.0, 3.0]).is_empty());
    }

    #[test]
    fn bounds_of_symmetric_problem() {
        let b = norm_bounds(&symmetric_problem()).unwrap();
        assert!((b.lower - (-2.0 + 48f64.sqrt()) / 22.0).abs() < 1e-12);
        assert!((b.upper - (-1.0 + 41f64.sqrt()) / 20.0).abs() < 1e-12);
        let r = &b.per_index;
        assert_eq!((r[0].s_b, r[0].delta_b, r[0].s_a, r[0].delta_a), (11.0, 10.0, 2.0, 1.0));
        assert_eq!((r[1].s_b, r[1].delta_b, r[1].s_a, r[1].delta_a), (11.0, 10.0, 2.0, 1.0));
    }

    #[test]
    fn bounds_scale_with_q() {
        let p = symmetric_problem().with_q(vec![-4.0, -4.0]).unwrap();
        let b = norm_bounds(&p).unwrap();
        assert!((b.lower - (-2.0 + (4.0f64 + 176.0).sqrt()) / 22.0).abs() < 1e-12);
        assert!((b.upper - (-1.0 + (1.0f64 + 160.0).sqrt()) / 20.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_hypotheses() {
        let p = symmetric_problem().with_q(vec![1.0, 0.0]).unwrap();
        assert!(matches!(norm_bounds(&p), Err(PcpError::NonNegativeQ)));
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.0, 1.0]);
        let p = QcpProblem::new(symmetric_problem().b().clone(), a, vec![-1.0, -1.0]).unwrap();
        assert_eq!(norm_bounds(&p).unwrap_err(), PcpError::NotGeneralizedSdd { which: "A", row: 0 });
        // the skewed system meets the hypotheses
        let s = skewed_system();
        let a = s.terms()[0].to_matrix().unwrap();
        let p = QcpProblem::new(s.terms()[1].clone(), a, vec![-1.0, -1.0]).unwrap();
        assert!(norm_bounds(&p).is_ok());
    }

    #[test]
    fn enumeration_of_symmetric_problem() {
        let p = symmetric_problem();
        let e = brute_force_solve(&p, &EnumerationOptions::default());
        let root = (-1.0 + 41f64.sqrt()) / 20.0;
        assert!(e.solutions.iter().any(|s| inf_dist(&s.x, &[root, root]) < 1e-9));
        for s in &e.solutions {
            assert!(verify(&p, &s.x, 1e-8));
        }
        assert_eq!(e.supports.len(), 4);
    }

    #[test]
    fn linear_interior_solution() {
        let p = QcpProblem::new(CubicalTensor::zeros(3, 2).unwrap(), DMatrix::identity(2, 2), vec![-1.0, -1.0]).unwrap();
        let e = brute_force_solve(&p, &EnumerationOptions::default());
        assert_eq!(e.solutions.len(), 1);
        assert!(inf_dist(&e.solutions[0].x, &[1.0, 1.0]) < 1e-12);
    }

    #[test]
    fn zero_solves_nonnegative_q() {
        let p = symmetric_problem().with_q(vec![1.0, 1.0]).unwrap();
        let e = brute_force_solve(&p, &EnumerationOptions::default());
        assert!(e.solutions.iter().any(|s| s.x == vec![0.0, 0.0]));
    }

    #[test]
    fn skewed_oracle_matches_solver() {
        let s = skewed_system();
        let a = s.terms()[0].to_matrix().unwrap();
        let p = QcpProblem::new(s.terms()[1].clone(), a, vec![-1.0, -1.0]).unwrap();
        let e = brute_force_solve(&p, &EnumerationOptions { newton_starts: Some(20), ..Default::default() });
        let interior: Vec<_> = e.solutions.iter().filter(|s| s.support.len() == 2).collect();
        assert_eq!(interior.len(), 1);
        assert!(inf_dist(&interior[0].x, &[0.167537466, 0.239082549]) < 1e-8);
    }

    #[test]
    fn leading_term_checks() {
        let id = CubicalTensor::identity(3, 2).unwrap();
        assert!(leading_sol_zero(&id.scale(-1.0).unwrap(), 1e-9));
        assert!(!leading_sol_zero(&CubicalTensor::zeros(3, 2).unwrap(), 1e-9));
        let r = leading_sol_zero(&id, 1e-9);
        assert_eq!(r, leading_sol_zero(&id.scale(7.5).unwrap(), 1e-9));
    }
}
