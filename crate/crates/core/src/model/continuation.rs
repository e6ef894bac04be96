use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::equilibria::HURWITZ_TOL;
use super::{LvModel, ModelError};
use crate::linalg::{self, inf_norm};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContinuationOptions {
    /// Newton stops when `||1 + Ax + eps Bx^2||_inf` falls below this.
    pub tol: f64,
    pub max_newton_iter: usize,
    /// Real parts within this distance of zero count as a loss of hyperbolicity.
    pub hyperbolic_tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_newton_iter: 50, hyperbolic_tol: HURWITZ_TOL }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationPoint {
    pub epsilon: f64,
    pub x: Vec<f64>,
    pub max_real_part: f64,
    pub hurwitz: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PathEnd {
    Completed,
    /// An eigenvalue reached the imaginary axis at this epsilon.
    LostHyperbolicity { epsilon: f64 },
    /// Newton found no root at this epsilon.
    NewtonDiverged { epsilon: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationPath {
    pub points: Vec<ContinuationPoint>,
    pub end: PathEnd,
    pub truncated: bool,
}

fn newton(model: &LvModel, eps: f64, x0: &[f64], opts: &ContinuationOptions) -> Option<Vec<f64>> {
    let n = model.dim();
    let residual = |x: &[f64]| -> Vec<f64> {
        let ax = model.a() * DVector::from_column_slice(x);
        let bx = model.b().tvp(x).expect("dim");
        (0..n).map(|i| 1.0 + ax[i] + eps * bx[i]).collect()
    };
    let mut x = x0.to_vec();
    let mut r = residual(&x);
    for _ in 0..opts.max_newton_iter {
        if inf_norm(&r) < opts.tol {
            return Some(x);
        }
        let jac: DMatrix<f64> = model.a() + model.b().tvp_jacobian(&x).expect("dim") * eps;
        let step = jac.lu().solve(&DVector::from_iterator(n, r.iter().map(|v| -v)))?;
        x.iter_mut().zip(step.iter()).for_each(|(a, d)| *a += d);
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        r = residual(&x);
    }
    (inf_norm(&r) < opts.tol).then_some(x)
}

fn spectrum_point(model: &LvModel, eps: f64, x: Vec<f64>) -> Result<ContinuationPoint, ModelError> {
    let scaled = model.as_general().with_b(model.b().scale(eps)?)?;
    let eigs = linalg::eigenvalues(&scaled.jacobian(&x)?);
    let max_real_part = linalg::spectral_abscissa(&eigs);
    Ok(ContinuationPoint { epsilon: eps, x, max_real_part, hurwitz: max_real_part < -HURWITZ_TOL })
}

/// Tracks the positive equilibrium of `1 + Ax + eps Bx^2 = 0` along an
/// increasing grid starting at `eps = 0`, seeding each Newton solve with
/// the previous point.
pub fn continuation(model: &LvModel, grid: &[f64], opts: &ContinuationOptions) -> Result<ContinuationPath, ModelError> {
    if grid.first() != Some(&0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ModelError::BadGrid);
    }
    let n = model.dim();
    let x0 = linalg::solve(&-model.a(), &vec![1.0; n]).ok_or(ModelError::SingularLinearPart)?;
    let start = spectrum_point(model, 0.0, x0)?;
    if start.max_real_part.abs() <= opts.hyperbolic_tol {
        return Err(ModelError::NotHyperbolic(start.max_real_part));
    }
    let sign = start.max_real_part.signum();
    let mut points = vec![start];
    let mut end = PathEnd::Completed;
    for &eps in &grid[1..] {
        let prev = &points.last().expect("nonempty").x;
        let Some(x) = newton(model, eps, prev, opts) else {
            end = PathEnd::NewtonDiverged { epsilon: eps };
            break;
        };
        let p = spectrum_point(model, eps, x)?;
        let lost = p.max_real_part.abs() <= opts.hyperbolic_tol || p.max_real_part.signum() != sign;
        points.push(p);
        if lost {
            end = PathEnd::LostHyperbolicity { epsilon: eps };
            break;
        }
    }
    Ok(ContinuationPath { truncated: end != PathEnd::Completed, points, end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_scenario, Scenario};
    use crate::tensor::CubicalTensor;

    /// Two species with `1 - x_i + b x_j^2`; the symmetric branch solves
    /// `1 - x + eps b x^2 = 0`.
    fn symmetric_pair(b: f64) -> LvModel {
        let hoi = CubicalTensor::zeros(3, 2).unwrap().with_entry(&[0, 1, 1], b).unwrap().with_entry(&[1, 0, 0], b).unwrap();
        LvModel::new(Scenario::General, vec![1.0, 1.0], -DMatrix::identity(2, 2), hoi).unwrap()
    }

    fn grid(step: f64, count: usize) -> Vec<f64> {
        (0..count).map(|k| k as f64 * step).collect()
    }

    #[test]
    fn zero_hoi_gives_constant_path() {
        let m = random_scenario(Scenario::Competitive, 3, 1).unwrap();
        let m = m.with_b(CubicalTensor::zeros(3, 3).unwrap()).unwrap();
        let path = continuation(&m, &grid(0.1, 6), &ContinuationOptions::default()).unwrap();
        assert_eq!(path.end, PathEnd::Completed);
        for p in &path.points {
            assert!(linalg::inf_dist(&p.x, &path.points[0].x) < 1e-14);
        }
    }

    #[test]
    fn fold_truncates_the_path() {
        // 1 - x + eps x^2 = 0 loses its root at eps = 1/4
        let path = continuation(&symmetric_pair(1.0), &grid(0.01, 40), &ContinuationOptions::default()).unwrap();
        assert!(path.truncated);
        let last = path.points.last().unwrap().epsilon;
        assert!(last <= 0.25 + 1e-12 && last > 0.2);
        for p in &path.points[1..] {
            if p.epsilon < 0.25 - 1e-9 {
                let exact = (1.0 - (1.0 - 4.0 * p.epsilon).sqrt()) / (2.0 * p.epsilon);
                assert!((p.x[0] - exact).abs() < 1e-9 && (p.x[1] - exact).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn small_perturbation_keeps_stability() {
        let m = random_scenario(Scenario::Competitive, 3, 7).unwrap();
        let path = continuation(&m, &grid(1e-3, 5), &ContinuationOptions::default()).unwrap();
        let sign0 = path.points[0].max_real_part.signum();
        assert!(path.points.iter().all(|p| p.max_real_part.signum() == sign0));
    }

    #[test]
    fn bad_inputs() {
        let m = symmetric_pair(1.0);
        assert_eq!(continuation(&m, &[0.1, 0.2], &ContinuationOptions::default()).unwrap_err(), ModelError::BadGrid);
        let singular = LvModel::new(Scenario::General, vec![1.0], DMatrix::zeros(1, 1), CubicalTensor::zeros(3, 1).unwrap())
            .unwrap();
        assert_eq!(continuation(&singular, &[0.0], &ContinuationOptions::default()).unwrap_err(), ModelError::SingularLinearPart);
    }
}
