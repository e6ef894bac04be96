//! Monotone fixed-point solvers for `sum_i A_i x^{i-1} = b`.
//!
//! Every term is split as `A = alpha I - B + N` with `B, N >= 0`. The
//! equation becomes `f(x) = g(x)` with `f(x) = sum (alpha_i I + N_i) x^{i-1}`
//! and `g(x) = sum B_i x^{i-1} + b`, and the solvers iterate
//! `x <- T(x) = f^{-1}(g(x))` from a lower and an upper starting point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{inf_dist, inf_norm, solve};
use crate::tensor::{classify, is_diagonal, shared_certificate, ClassifyOptions, CubicalTensor, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("system has no terms")]
    Empty,
    #[error("term orders must be distinct and >= 2, got {0:?}")]
    BadOrders(Vec<usize>),
    #[error("rhs component {index} is {value}, must be positive")]
    NonPositiveRhs { index: usize, value: f64 },
    #[error("certificate fails for term of order {order}: component {component} is {value}")]
    CertificateViolated { order: usize, component: usize, value: f64 },
    #[error("no shared S-certificate found")]
    Uncertified,
    #[error("term of order {order} is not an M-tensor: {reason}")]
    NotMTensor { order: usize, reason: String },
    #[error("inner solve of f(x) = y failed, residual {residual:e}")]
    InnerSolve { residual: f64 },
    #[error("no convergence after {iterations} iterations, bracket gap {gap:e}")]
    NoConvergence { iterations: usize, gap: f64, lower: Vec<f64>, upper: Vec<f64> },
}

/// The equation `sum_i A_i x^{i-1} = b` with terms sorted by order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemFile")]
pub struct PolySystem {
    terms: Vec<CubicalTensor>,
    rhs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub terms: Vec<CubicalTensor>,
    pub rhs: Vec<f64>,
}

impl TryFrom<SystemFile> for PolySystem {
    type Error = PolyError;

    fn try_from(f: SystemFile) -> Result<Self, Self::Error> {
        PolySystem::new(f.terms, f.rhs)
    }
}

impl PolySystem {
    pub fn new(mut terms: Vec<CubicalTensor>, rhs: Vec<f64>) -> Result<Self, PolyError> {
        if terms.is_empty() {
            return Err(PolyError::Empty);
        }
        terms.sort_by_key(|t| t.order());
        let orders: Vec<usize> = terms.iter().map(|t| t.order()).collect();
        if orders.windows(2).any(|w| w[0] == w[1]) {
            return Err(PolyError::BadOrders(orders));
        }
        let n = terms[0].dim();
        if let Some(t) = terms.iter().find(|t| t.dim() != n) {
            return Err(TensorError::DimensionMismatch { expected: n, got: t.dim() }.into());
        }
        if rhs.len() != n {
            return Err(TensorError::DimensionMismatch { expected: n, got: rhs.len() }.into());
        }
        if let Some((index, &value)) = rhs.iter().enumerate().find(|(_, &v)| !(v > 0.0) || !v.is_finite()) {
            return Err(PolyError::NonPositiveRhs { index, value });
        }
        Ok(Self { terms, rhs })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn terms(&self) -> &[CubicalTensor] {
        &self.terms
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `sum_i A_i x^{i-1}`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for t in &self.terms {
            let y = t.tvp(x).expect("dimension validated");
            out.iter_mut().zip(y).for_each(|(o, v)| *o += v);
        }
        out
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        inf_dist(&self.eval(x), &self.rhs)
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile { terms: self.terms.clone(), rhs: self.rhs.clone() }
    }
}

/// Divides row `j` of every term by `b_j`, giving an equivalent system with
/// right-hand side `1` and the same solutions.
pub fn normalize_rhs(system: &PolySystem) -> PolySystem {
    let inv: Vec<f64> = system.rhs.iter().map(|b| 1.0 / b).collect();
    let terms = system
        .terms
        .iter()
        .map(|t| if inv.iter().all(|&s| s == 1.0) { t.clone() } else { t.scale_rows(&inv).expect("dim") })
        .collect();
    PolySystem { terms, rhs: vec![1.0; system.dim()] }
}

/// `A = alpha I - b_part + n_part`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitTerm {
    pub alpha: f64,
    pub b_part: CubicalTensor,
    pub n_part: CubicalTensor,
}

impl SplitTerm {
    pub fn order(&self) -> usize {
        self.b_part.order()
    }

    pub fn reconstruct(&self) -> CubicalTensor {
        let id = CubicalTensor::identity(self.order(), self.b_part.dim()).expect("shape");
        id.scale(self.alpha)
            .and_then(|t| t.sub(&self.b_part))
            .and_then(|t| t.add(&self.n_part))
            .expect("shape")
    }
}

pub fn split_term(a: &CubicalTensor) -> SplitTerm {
    let alpha = a.diagonal().into_iter().fold(0.0, f64::max);
    let b_part = a
        .map_indexed(|idx, v| if is_diagonal(idx) { alpha - v } else { (-v).max(0.0) })
        .expect("finite");
    let n_part = a
        .map_indexed(|idx, v| if is_diagonal(idx) { 0.0 } else { v.max(0.0) })
        .expect("finite");
    SplitTerm { alpha, b_part, n_part }
}

/// Per-term contributions `c_i = A_i v^{i-1}`, each required to be positive.
fn contributions(system: &PolySystem, v: &[f64]) -> Result<Vec<(usize, Vec<f64>)>, PolyError> {
    system
        .terms
        .iter()
        .map(|t| {
            let c = t.tvp(v)?;
            if let Some((component, &value)) = c.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
                return Err(PolyError::CertificateViolated { order: t.order(), component, value });
            }
            Ok((t.order(), c))
        })
        .collect()
}

fn scalar_root<F: Fn(f64) -> f64>(phi: F) -> f64 {
    // phi is strictly increasing from 0 at s = 0
    let mut hi = 1.0;
    while phi(hi) < 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scalars `t <= w` with `max_j (sum A_i (t v)^{i-1})_j = 1` and
/// `min_j (sum A_i (w v)^{i-1})_j = 1`, for a system with rhs `1`.
pub fn bracket_scalars(system: &PolySystem, v: &[f64]) -> Result<(f64, f64), PolyError> {
    let c = contributions(system, v)?;
    let n = system.dim();
    let phi = |s: f64, j: usize| c.iter().map(|(order, cj)| s.powi(*order as i32 - 1) * cj[j]).sum::<f64>();
    let t = scalar_root(|s| (0..n).map(|j| phi(s, j)).fold(f64::NEG_INFINITY, f64::max));
    let w = scalar_root(|s| (0..n).map(|j| phi(s, j)).fold(f64::INFINITY, f64::min));
    Ok((t, w))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub inner_max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 5_000, inner_max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveTag {
    Positive,
    BoundaryInconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub solution: Vec<f64>,
    pub residual_inf: f64,
    pub iters_below: usize,
    pub iters_above: usize,
    pub lower_trace: Vec<Vec<f64>>,
    pub upper_trace: Vec<Vec<f64>>,
    /// Limit of the iteration started below.
    pub lower_limit: Vec<f64>,
    /// Limit of the iteration started above.
    pub upper_limit: Vec<f64>,
    pub unique_certified: bool,
    /// Starting points of the two iterations.
    pub bracket: (Vec<f64>, Vec<f64>),
    pub certificate: Vec<f64>,
    /// Whether the traces are ordered: lower nondecreasing, upper
    /// nonincreasing, and lower below upper at every step.
    pub monotone: bool,
    pub tag: SolveTag,
}

/// Solver for the map `T = f^{-1} o g` of a normalized system.
struct FixedPointMap {
    splits: Vec<SplitTerm>,
    rhs: Vec<f64>,
    diagonal_f: bool,
}

impl FixedPointMap {
    fn new(system: &PolySystem) -> Self {
        let splits: Vec<SplitTerm> = system.terms.iter().map(split_term).collect();
        let diagonal_f = splits.iter().all(|s| s.n_part.entries().iter().all(|&v| v == 0.0));
        Self { splits, rhs: system.rhs.clone(), diagonal_f }
    }

    fn g(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.rhs.clone();
        for s in &self.splits {
            let y = s.b_part.tvp(x).expect("dim");
            out.iter_mut().zip(y).for_each(|(o, v)| *o += v);
        }
        out
    }

    fn apply(&self, x: &[f64], inner_max_iter: usize, tol: f64) -> Result<Vec<f64>, PolyError> {
        invert_f(&self.splits, &self.g(x), tol, inner_max_iter, Some(x))
    }
}

fn diag_f(splits: &[SplitTerm], s: f64) -> f64 {
    splits.iter().map(|t| t.alpha * s.powi(t.order() as i32 - 1)).sum()
}

fn f_eval(splits: &[SplitTerm], x: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().map(|&xi| diag_f(splits, xi)).collect();
    for t in splits {
        let y = t.n_part.tvp(x).expect("dim");
        out.iter_mut().zip(y).for_each(|(o, v)| *o += v);
    }
    out
}

/// Scalar solve of `sum_i alpha_i s^{i-1} = y` for `s >= 0`.
fn diag_inverse(splits: &[SplitTerm], y: f64) -> Option<f64> {
    if y <= 0.0 {
        return Some(0.0);
    }
    if splits.iter().all(|t| t.alpha == 0.0) {
        return None;
    }
    let mut hi = 1.0;
    while diag_f(splits, hi) < y {
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if diag_f(splits, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Solves `f(x) = y` where `f(x) = sum (alpha_i I + N_i) x^{i-1}`.
///
/// With every `N_i = 0` the map is componentwise and each component is
/// found by bisection. Otherwise damped Newton runs from `start` (or the
/// componentwise guess), halving the step on residual increase down to
/// `2^-20`, and falls back to the sweep
/// `x <- diag-solve(y - sum N_i x^{i-1})` if Newton stalls.
pub fn invert_f(
    splits: &[SplitTerm],
    y: &[f64],
    tol: f64,
    max_iter: usize,
    start: Option<&[f64]>,
) -> Result<Vec<f64>, PolyError> {
    let diag_solve = |rhs: &[f64]| -> Result<Vec<f64>, PolyError> {
        rhs.iter()
            .map(|&v| diag_inverse(splits, v).ok_or(PolyError::InnerSolve { residual: f64::INFINITY }))
            .collect()
    };
    let diagonal = splits.iter().all(|s| s.n_part.entries().iter().all(|&v| v == 0.0));
    if diagonal {
        return diag_solve(y);
    }

    let scale = inf_norm(y).max(1.0);
    let inner_tol = (tol * 1e-3).max(1e-15 * scale);
    let resid = |x: &[f64]| inf_dist(&f_eval(splits, x), y);

    let mut x = match start {
        Some(s) if s.iter().all(|&v| v > 0.0) => s.to_vec(),
        _ => diag_solve(y)?,
    };
    let mut r = resid(&x);
    let mut newton_ok = true;
    for _ in 0..max_iter {
        if r < inner_tol {
            return Ok(x);
        }
        let fx = f_eval(splits, &x);
        let mut jac = nalgebra::DMatrix::zeros(x.len(), x.len());
        for t in splits {
            jac += t.n_part.tvp_jacobian(&x)?;
            for (i, &xi) in x.iter().enumerate() {
                let p = t.order() as i32 - 1;
                jac[(i, i)] += t.alpha * p as f64 * xi.powi(p - 1);
            }
        }
        let minus_f: Vec<f64> = fx.iter().zip(y).map(|(a, b)| b - a).collect();
        let Some(step) = solve(&jac, &minus_f) else {
            newton_ok = false;
            break;
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= 2f64.powi(-20) {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            if cand.iter().all(|&v| v >= 0.0) {
                let rc = resid(&cand);
                if rc < r {
                    x = cand;
                    r = rc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            newton_ok = false;
            break;
        }
    }
    if newton_ok && r < inner_tol {
        return Ok(x);
    }

    // fallback sweep
    for _ in 0..max_iter * 50 {
        let mut rhs = y.to_vec();
        for t in splits {
            let v = t.n_part.tvp(&x)?;
            rhs.iter_mut().zip(v).for_each(|(o, n)| *o -= n);
        }
        let next = diag_solve(&rhs)?;
        let step = inf_dist(&next, &x);
        x = next;
        if step < inner_tol {
            break;
        }
    }
    let r = resid(&x);
    if r < inner_tol.max(tol) {
        Ok(x)
    } else {
        Err(PolyError::InnerSolve { residual: r })
    }
}

struct OneSided {
    limit: Vec<f64>,
    trace: Vec<Vec<f64>>,
    iterations: usize,
    converged: bool,
}

fn iterate(map: &FixedPointMap, system: &PolySystem, x0: Vec<f64>, opts: SolveOptions) -> Result<OneSided, PolyError> {
    let mut trace = vec![x0.clone()];
    let mut x = x0;
    for it in 1..=opts.max_iter {
        let next = map.apply(&x, opts.inner_max_iter, opts.tol)?;
        let step = inf_dist(&next, &x);
        x = next;
        trace.push(x.clone());
        if step < opts.tol && system.residual(&x) < opts.tol {
            return Ok(OneSided { limit: x, trace, iterations: it, converged: true });
        }
    }
    Ok(OneSided { limit: x, trace, iterations: opts.max_iter, converged: false })
}

fn traces_monotone(lower: &[Vec<f64>], upper: &[Vec<f64>]) -> bool {
    let slack = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs()).max(1.0);
    let nondecreasing = lower
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| *a <= *b + slack(*a, *b)));
    let nonincreasing = upper
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| *a + slack(*a, *b) >= *b));
    let last_upper = upper.last().cloned().unwrap_or_default();
    let below = lower
        .iter()
        .all(|l| l.iter().zip(&last_upper).all(|(a, b)| *a <= *b + slack(*a, *b)));
    nondecreasing && nonincreasing && below
}

fn finish(
    system: &PolySystem,
    below: OneSided,
    above: OneSided,
    bracket: (Vec<f64>, Vec<f64>),
    certificate: Vec<f64>,
    opts: SolveOptions,
) -> Result<SolveResult, PolyError> {
    if !below.converged || !above.converged {
        return Err(PolyError::NoConvergence {
            iterations: below.iterations.max(above.iterations),
            gap: inf_dist(&below.limit, &above.limit),
            lower: below.limit,
            upper: above.limit,
        });
    }
    let gap = inf_dist(&below.limit, &above.limit);
    let unique_certified = gap < 10.0 * opts.tol;
    let (rl, ru) = (system.residual(&below.limit), system.residual(&above.limit));
    let solution = if ru < rl { above.limit.clone() } else { below.limit.clone() };
    let positive = below.limit.iter().all(|&v| v > opts.tol);
    Ok(SolveResult {
        residual_inf: system.residual(&solution),
        solution,
        iters_below: below.iterations,
        iters_above: above.iterations,
        monotone: traces_monotone(&below.trace, &above.trace),
        lower_trace: below.trace,
        upper_trace: above.trace,
        lower_limit: below.limit,
        upper_limit: above.limit,
        unique_certified,
        bracket,
        certificate,
        tag: if positive && unique_certified { SolveTag::Positive } else { SolveTag::BoundaryInconclusive },
    })
}

fn find_certificate(system: &PolySystem, v: Option<&[f64]>) -> Result<Vec<f64>, PolyError> {
    let refs: Vec<&CubicalTensor> = system.terms.iter().collect();
    match v {
        Some(v) => {
            if v.len() != system.dim() {
                return Err(TensorError::DimensionMismatch { expected: system.dim(), got: v.len() }.into());
            }
            contributions(system, v)?;
            Ok(v.to_vec())
        }
        None => shared_certificate(&refs, None, 10_000).ok_or(PolyError::Uncertified),
    }
}

/// Solves an S-tensor system from both sides of the bracket `[t v, w v]`.
///
/// `v` must satisfy `A_i v^{i-1} > 0` for every term; when absent a shared
/// certificate is searched for. Arbitrary positive `b` is handled by
/// normalizing the rows first.
pub fn solve_s_tensor(system: &PolySystem, v: Option<&[f64]>, opts: SolveOptions) -> Result<SolveResult, PolyError> {
    let certificate = find_certificate(system, v)?;
    let normalized = normalize_rhs(system);
    let (t, w) = bracket_scalars(&normalized, &certificate)?;
    let lower0: Vec<f64> = certificate.iter().map(|c| t * c).collect();
    let upper0: Vec<f64> = certificate.iter().map(|c| w * c).collect();
    let map = FixedPointMap::new(&normalized);
    let (below, above) = rayon::join(
        || iterate(&map, system, lower0.clone(), opts),
        || iterate(&map, system, upper0.clone(), opts),
    );
    finish(system, below?, above?, (lower0, upper0), certificate, opts)
}

/// Solver for systems whose terms are all M-tensors.
///
/// Iterates from `0` towards the minimal fixed point and from `w v` towards
/// the maximal one; the result is tagged positive only when the minimal
/// fixed point is positive and the two limits meet.
pub fn solve_m_tensor(system: &PolySystem, opts: SolveOptions) -> Result<SolveResult, PolyError> {
    for t in &system.terms {
        let report = classify(t, &ClassifyOptions::default());
        if !report.is_m_tensor {
            let reason = if !t.has_nonpositive_off_diagonal() {
                "positive off-diagonal entry".to_string()
            } else {
                format!(
                    "max diagonal {} below spectral radius {:?} of the majorant",
                    report.comparison_shift, report.spectral_radius_of_majorant
                )
            };
            return Err(PolyError::NotMTensor { order: t.order(), reason });
        }
    }
    let certificate = find_certificate(system, None)?;
    let normalized = normalize_rhs(system);
    let (_, w) = bracket_scalars(&normalized, &certificate)?;
    let upper0: Vec<f64> = certificate.iter().map(|c| w * c).collect();
    let lower0 = vec![0.0; system.dim()];
    let map = FixedPointMap::new(system);
    debug_assert!(map.diagonal_f);
    let (below, above) = rayon::join(
        || iterate(&map, system, lower0.clone(), opts),
        || iterate(&map, system, upper0.clone(), opts),
    );
    finish(system, below?, above?, (lower0, upper0), certificate, opts)
}

/// Plain iteration `x <- T(x)` of the normalized system from `x0`.
pub fn picard(system: &PolySystem, x0: &[f64], opts: SolveOptions) -> Result<Vec<f64>, PolyError> {
    let normalized = normalize_rhs(system);
    let map = FixedPointMap::new(&normalized);
    let run = iterate(&map, system, x0.to_vec(), opts)?;
    if run.converged {
        Ok(run.limit)
    } else {
        Err(PolyError::NoConvergence {
            iterations: run.iterations,
            gap: f64::NAN,
            lower: run.limit.clone(),
            upper: run.limit,
        })
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn id(m: usize, n: usize) -> CubicalTensor {
        CubicalTensor::identity(m, n).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(PolySystem::new(vec![], vec![]), Err(PolyError::Empty)));
        assert!(matches!(
            PolySystem::new(vec![id(2, 2), id(2, 2)], vec![1.0, 1.0]),
            Err(PolyError::BadOrders(_))
        ));
        assert!(matches!(
            PolySystem::new(vec![id(2, 2)], vec![1.0, 0.0]),
            Err(PolyError::NonPositiveRhs { index: 1, .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let s = symmetric_system();
        assert_eq!(normalize_rhs(&s), s);
        let d = CubicalTensor::new(2, 2, vec![2.0, 0.0, 0.0, 4.0]).unwrap();
        let s = PolySystem::new(vec![d], vec![2.0, 4.0]).unwrap();
        let n = normalize_rhs(&s);
        assert_eq!(n.terms()[0], id(2, 2));
        assert_eq!(n.rhs(), &[1.0, 1.0]);
        assert_eq!(normalize_rhs(&n), n);
    }

    #[test]
    fn split_examples() {
        let s = split_term(&id(3, 2));
        assert_eq!(s.alpha, 1.0);
        assert!(s.b_part.entries().iter().all(|&v| v == 0.0));
        assert!(s.n_part.entries().iter().all(|&v| v == 0.0));

        let full = CubicalTensor::from_fn(3, 2, |idx| if is_diagonal(idx) { 11.0 } else { -1.0 }).unwrap();
        let s = split_term(&full);
        assert_eq!(s.alpha, 11.0);
        assert_eq!(s.b_part, CubicalTensor::from_fn(3, 2, |idx| if is_diagonal(idx) { 0.0 } else { 1.0 }).unwrap());
        assert_eq!(s.reconstruct(), full);

        let sys = skewed_system();
        let two = &sys.terms()[1];
        let s = split_term(two);
        assert_eq!(s.n_part.get(&[0, 1, 0]), 10.0);
        assert_eq!(s.b_part.get(&[0, 1, 0]), 0.0);
        assert_eq!(s.reconstruct(), *two);
    }

    #[test]
    fn bracket_examples() {
        let s = PolySystem::new(vec![id(3, 2)], vec![1.0, 1.0]).unwrap();
        let (t, w) = bracket_scalars(&s, &[1.0, 1.0]).unwrap();
        assert!((t - 1.0).abs() < 1e-14 && (w - 1.0).abs() < 1e-14);

        let s = PolySystem::new(vec![id(3, 2), id(2, 2)], vec![1.0, 1.0]).unwrap();
        let (t, w) = bracket_scalars(&s, &[1.0, 1.0]).unwrap();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((t - golden).abs() < 1e-14 && (w - golden).abs() < 1e-14);

        let (t, w) = bracket_scalars(&skewed_system(), &[0.1117, 1.0]).unwrap();
        assert!(t < w && w.is_finite() && t > 0.0);

        assert!(matches!(
            bracket_scalars(&s, &[1.0, -1.0]),
            Err(PolyError::CertificateViolated { .. })
        ));
    }

    #[test]
    fn invert_f_examples() {
        let splits = vec![split_term(&id(2, 2))];
        assert_eq!(invert_f(&splits, &[3.0, 4.0], 1e-12, 200, None).unwrap(), vec![3.0, 4.0]);
        let splits = vec![split_term(&id(3, 2)), split_term(&id(2, 2))];
        let x = invert_f(&splits, &[2.0, 2.0], 1e-12, 200, None).unwrap();
        assert!(inf_dist(&x, &[1.0, 1.0]) < 1e-14);

        let splits: Vec<SplitTerm> = skewed_system().terms().iter().map(split_term).collect();
        let y = [3.0, 2.5];
        let x = invert_f(&splits, &y, 1e-12, 200, None).unwrap();
        assert!(inf_dist(&f_eval(&splits, &x), &y) < 1e-12);
    }

    #[test]
    fn symmetric_system_solution() {
        let r = solve_s_tensor(&symmetric_system(), None, SolveOptions::default()).unwrap();
        let root = (-1.0 + 41f64.sqrt()) / 20.0;
        assert!(inf_dist(&r.solution, &[root, root]) < 1e-9);
        assert!(r.residual_inf < 1e-10);
        assert!(r.unique_certified);
        assert!(r.monotone);
        assert_eq!(r.tag, SolveTag::Positive);
    }

    #[test]
    fn identity_system() {
        let s = PolySystem::new(vec![id(3, 2)], vec![1.0, 1.0]).unwrap();
        let r = solve_s_tensor(&s, None, SolveOptions::default()).unwrap();
        assert!(inf_dist(&r.solution, &[1.0, 1.0]) < 1e-12);
    }

    #[test]
    fn m_solver_examples() {
        let s = PolySystem::new(vec![id(3, 2), id(2, 2)], vec![2.0, 2.0]).unwrap();
        let r = solve_m_tensor(&s, SolveOptions::default()).unwrap();
        assert!(inf_dist(&r.lower_limit, &[1.0, 1.0]) < 1e-9);
        assert!(inf_dist(&r.upper_limit, &[1.0, 1.0]) < 1e-9);
        assert_eq!(r.tag, SolveTag::Positive);

        let s = PolySystem::new(vec![id(2, 3)], vec![1.5, 2.0, 0.25]).unwrap();
        let r = solve_m_tensor(&s, SolveOptions::default()).unwrap();
        assert_eq!(r.lower_trace[1], vec![1.5, 2.0, 0.25]);

        let a = solve_s_tensor(&symmetric_system(), None, SolveOptions::default()).unwrap();
        let b = solve_m_tensor(&symmetric_system(), SolveOptions::default()).unwrap();
        assert!(inf_dist(&a.solution, &b.solution) < 1e-9);
        assert!(b.monotone);
    }

    #[test]
    fn m_solver_rejects_positive_off_diagonal() {
        assert!(matches!(
            solve_m_tensor(&skewed_system(), SolveOptions::default()),
            Err(PolyError::NotMTensor { order: 2, .. })
        ));
    }

    #[test]
    fn skewed_system_converges_without_monotone_traces() {
        let s = skewed_system();
        let r = solve_s_tensor(&s, Some(&[0.1117, 1.0]), SolveOptions::default()).unwrap();
        assert!(r.residual_inf < 1e-10);
        assert!(r.unique_certified);
        assert!(inf_dist(&r.solution, &[0.167537466, 0.239082549]) < 1e-8);
        // f^{-1} is not isotone once N != 0
        assert!(!r.monotone);
    }

    #[test]
    fn scaled_rhs_gives_same_solution() {
        let base = symmetric_system();
        let b = vec![2.0, 0.5];
        let s = PolySystem::new(base.terms().to_vec(), b).unwrap();
        let r = solve_s_tensor(&s, None, SolveOptions::default()).unwrap();
        let r2 = solve_s_tensor(&normalize_rhs(&s), None, SolveOptions::default()).unwrap();
        assert!(inf_dist(&r.solution, &r2.solution) < 1e-9);
        assert!(s.residual(&r.solution) < 1e-10);
    }

    #[test]
    fn uncertified_system() {
        let neg = id(2, 2).scale(-1.0).unwrap();
        let s = PolySystem::new(vec![neg], vec![1.0, 1.0]).unwrap();
        assert!(matches!(solve_s_tensor(&s, None, SolveOptions::default()), Err(PolyError::Uncertified)));
    }
}
