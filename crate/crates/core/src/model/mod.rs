//! Higher-order Lotka-Volterra models
//! `x' = r . x . (1 + Ax + Bx^2)`, with every scenario's sign convention
//! baked into the stored `A` and `B`.

mod continuation;
mod equilibria;
mod stability;

pub use continuation::{continuation, ContinuationOptions, ContinuationPath, ContinuationPoint, PathEnd};
pub use equilibria::{
    classify_equilibrium, find_equilibria, refine_on_support, report_at, EquilibriumKind, EquilibriumOptions,
    EquilibriumReport, Outcome, Verdict, VerdictId, Verdicts, HURWITZ_TOL,
};
pub use stability::{
    global_stability_conditions, metzler_hurwitz_certificate, permute_two_faction, permuted_jacobian,
    GlobalOptions, MetzlerCertificate, WtaReport, wta_check,
};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::matrix_rows;
use crate::linalg;
use crate::tensor::{CubicalTensor, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("r has length {r}, A is {rows}x{cols}, B has dimension {b}")]
    Shape { r: usize, rows: usize, cols: usize, b: usize },
    #[error("B must have order 3, got {0}")]
    NotCubic(usize),
    #[error("intrinsic rate r[{0}] must be positive")]
    NonPositiveRate(usize),
    #[error("{scenario} model violates its sign pattern: {detail}")]
    SignPattern { scenario: &'static str, detail: String },
    #[error("A is reducible")]
    Reducible,
    #[error("faction sizes {m} + {n} do not match dimension {dim}")]
    Blocks { m: usize, n: usize, dim: usize },
    #[error("state has length {got}, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("residual {residual:e} exceeds {tol:e}: not an equilibrium")]
    NotEquilibrium { residual: f64, tol: f64 },
    #[error("operation requires a {expected} model")]
    WrongScenario { expected: &'static str },
    #[error("matrix is not Metzler")]
    NotMetzler,
    #[error("unperturbed system -Ax = 1 is singular")]
    SingularLinearPart,
    #[error("unperturbed equilibrium is not hyperbolic (max real part {0:e})")]
    NotHyperbolic(f64),
    #[error("need r_hat > eps > 0, got r_hat = {r_hat}, eps = {eps}")]
    BadBox { r_hat: f64, eps: f64 },
    #[error("epsilon grid must start at 0 and increase")]
    BadGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    General,
    Cooperative,
    /// First `m` coordinates form one faction, the remaining `n` the other.
    TwoFaction { m: usize, n: usize },
    Competitive,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::General => "general",
            Scenario::Cooperative => "cooperative",
            Scenario::TwoFaction { .. } => "two_faction",
            Scenario::Competitive => "competitive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct LvModel {
    scenario: Scenario,
    r: Vec<f64>,
    a: DMatrix<f64>,
    b: CubicalTensor,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Blocks {
    pub m: usize,
    pub n: usize,
}

/// On-disk model layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub scenario: String,
    pub r: Vec<f64>,
    #[serde(rename = "A", with = "matrix_rows")]
    pub a: DMatrix<f64>,
    #[serde(rename = "B")]
    pub b: CubicalTensor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Blocks>,
}

impl TryFrom<ModelFile> for LvModel {
    type Error = ModelError;

    fn try_from(f: ModelFile) -> Result<Self, Self::Error> {
        let scenario = match (f.scenario.as_str(), f.blocks) {
            ("general", _) => Scenario::General,
            ("cooperative", _) => Scenario::Cooperative,
            ("competitive", _) => Scenario::Competitive,
            ("two_faction", Some(Blocks { m, n })) => Scenario::TwoFaction { m, n },
            ("two_faction", None) => {
                return Err(ModelError::SignPattern { scenario: "two_faction", detail: "missing blocks".into() })
            }
            (other, _) => {
                return Err(ModelError::SignPattern { scenario: "general", detail: format!("unknown scenario {other:?}") })
            }
        };
        LvModel::new(scenario, f.r, f.a, f.b)
    }
}

impl From<LvModel> for ModelFile {
    fn from(m: LvModel) -> Self {
        let blocks = match m.scenario {
            Scenario::TwoFaction { m, n } => Some(Blocks { m, n }),
            _ => None,
        };
        ModelFile { scenario: m.scenario.name().into(), r: m.r, a: m.a, b: m.b, blocks }
    }
}

fn sign_error(scenario: Scenario, detail: String) -> ModelError {
    ModelError::SignPattern { scenario: scenario.name(), detail }
}

impl LvModel {
    pub fn new(scenario: Scenario, r: Vec<f64>, a: DMatrix<f64>, b: CubicalTensor) -> Result<Self, ModelError> {
        if b.order() != 3 {
            return Err(ModelError::NotCubic(b.order()));
        }
        let n = r.len();
        if a.nrows() != n || a.ncols() != n || b.dim() != n {
            return Err(ModelError::Shape { r: n, rows: a.nrows(), cols: a.ncols(), b: b.dim() });
        }
        if let Some(i) = r.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(ModelError::NonPositiveRate(i));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(sign_error(scenario, "A has a non-finite entry".into()));
        }
        let model = Self { scenario, r, a, b };
        model.check_pattern()?;
        Ok(model)
    }

    fn check_pattern(&self) -> Result<(), ModelError> {
        let n = self.dim();
        let sc = self.scenario;
        for i in 0..n {
            if self.a[(i, i)] > 0.0 {
                return Err(sign_error(sc, format!("A[{i}][{i}] > 0")));
            }
            if self.b.get(&[i, i, i]) > 0.0 {
                return Err(sign_error(sc, format!("B[{i}][{i}][{i}] > 0")));
            }
        }
        match sc {
            Scenario::General => {}
            Scenario::Cooperative => {
                if !linalg::is_metzler(&self.a) {
                    return Err(sign_error(sc, "A is not Metzler".into()));
                }
                if !self.b.is_metzler() {
                    return Err(sign_error(sc, "B is not Metzler".into()));
                }
                if !linalg::is_irreducible(&self.a) {
                    return Err(ModelError::Reducible);
                }
            }
            Scenario::Competitive => {
                if let Some(v) = self.a.iter().find(|&&v| v > 0.0) {
                    return Err(sign_error(sc, format!("A has positive entry {v}")));
                }
                if !self.b.entries().iter().all(|&v| v <= 0.0) {
                    return Err(sign_error(sc, "B has a positive entry".into()));
                }
            }
            Scenario::TwoFaction { m, n: k } => {
                if m + k != n {
                    return Err(ModelError::Blocks { m, n: k, dim: n });
                }
                let side = |i: usize| i < m;
                for i in 0..n {
                    for j in 0..n {
                        let v = self.a[(i, j)];
                        if i != j && side(i) == side(j) && v < 0.0 {
                            return Err(sign_error(sc, format!("intra-faction A[{i}][{j}] < 0")));
                        }
                        if side(i) != side(j) && v > 0.0 {
                            return Err(sign_error(sc, format!("cross-faction A[{i}][{j}] > 0")));
                        }
                        for l in 0..n {
                            let v = self.b.get(&[i, j, l]);
                            if side(j) != side(l) && v != 0.0 {
                                return Err(sign_error(sc, format!("mixed-faction product in B[{i}][{j}][{l}]")));
                            }
                            let own = side(j) == side(i) && side(l) == side(i);
                            if own && !(j == i && l == i) && v < 0.0 {
                                return Err(sign_error(sc, format!("intra-faction B[{i}][{j}][{l}] < 0")));
                            }
                            if side(j) != side(i) && side(l) != side(i) && v > 0.0 {
                                return Err(sign_error(sc, format!("cross-faction B[{i}][{j}][{l}] > 0")));
                            }
                        }
                    }
                }
                if !linalg::is_irreducible(&self.a) {
                    return Err(ModelError::Reducible);
                }
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &CubicalTensor {
        &self.b
    }

    /// Same coefficients, reinterpreted under the general scenario.
    pub fn as_general(&self) -> Self {
        Self { scenario: Scenario::General, ..self.clone() }
    }

    /// Replaces `B`, re-validating the scenario's sign pattern.
    pub fn with_b(&self, b: CubicalTensor) -> Result<Self, ModelError> {
        Self::new(self.scenario, self.r.clone(), self.a.clone(), b)
    }

    fn check_len(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.dim() {
            return Err(ModelError::StateLength { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// Per-capita growth factors `L(x) = 1 + Ax + Bx^2`.
    pub fn growth(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_len(x)?;
        let ax = &self.a * DVector::from_column_slice(x);
        let bx = self.b.tvp(x)?;
        Ok(ax.iter().zip(bx).map(|(u, v)| 1.0 + u + v).collect())
    }

    pub fn rhs(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        let l = self.growth(x)?;
        Ok((0..self.dim()).map(|i| self.r[i] * x[i] * l[i]).collect())
    }

    /// `J_ij = delta_ij r_i L_i(x) + r_i x_i (A_ij + sum_k (B_ijk + B_ikj) x_k)`.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>, ModelError> {
        let l = self.growth(x)?;
        let dl = &self.a + self.b.tvp_jacobian(x)?;
        let n = self.dim();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j { self.r[i] * l[i] } else { 0.0 };
            diag + self.r[i] * x[i] * dl[(i, j)]
        }))
    }

    /// Multiplies every cross-faction higher-order entry in the rows of
    /// faction `faction` (0 or 1) by `factor`.
    pub fn scale_cross_hoi(&self, faction: usize, factor: f64) -> Result<Self, ModelError> {
        let Scenario::TwoFaction { m, .. } = self.scenario else {
            return Err(ModelError::WrongScenario { expected: "two_faction" });
        };
        let side = |i: usize| usize::from(i >= m);
        let b = self.b.map_indexed(|idx, v| {
            if side(idx[0]) == faction && side(idx[1]) != faction && side(idx[2]) != faction {
                v * factor
            } else {
                v
            }
        })?;
        self.with_b(b)
    }

    /// Strengthens each `B_iii` so that `-B_iii >= (1 + margin) r_i(B)_+`.
    ///
    /// On the face where `x_i` is the largest component, `L_i` is then
    /// negative for large `x_i`, so every box `[0, R]^n` with `R` large
    /// enough is forward invariant and trajectories stay bounded.
    pub fn self_regulated(&self, margin: f64) -> Result<Self, ModelError> {
        let n = self.dim();
        let mut b = self.b.clone();
        for i in 0..n {
            let plus = self.b.row_sums(i)?.plus;
            let need = (1.0 + margin) * plus;
            if -self.b.get(&[i, i, i]) < need {
                b = b.with_entry(&[i, i, i], -need)?;
            }
        }
        self.with_b(b)
    }
}

/// Magnitude parameters of a two-faction model; every entry is nonnegative
/// and the signs are applied by [`TwoFactionParams::build`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoFactionParams {
    pub r: Vec<f64>,
    pub r_hat: Vec<f64>,
    /// `m x m`; diagonal is self-limitation, off-diagonal cooperation.
    #[serde(with = "matrix_rows")]
    pub a: DMatrix<f64>,
    /// `m x n`, competition felt by the first faction.
    #[serde(with = "matrix_rows")]
    pub b: DMatrix<f64>,
    #[serde(with = "matrix_rows")]
    pub a_hat: DMatrix<f64>,
    #[serde(with = "matrix_rows")]
    pub b_hat: DMatrix<f64>,
    /// `c[i][j][k]`, `j, k` in the first faction.
    pub c: Vec<f64>,
    /// `d[i][j][k]`, `j, k` in the second faction.
    pub d: Vec<f64>,
    pub c_hat: Vec<f64>,
    pub d_hat: Vec<f64>,
}

impl TwoFactionParams {
    pub fn build(&self) -> Result<LvModel, ModelError> {
        let (m, n) = (self.r.len(), self.r_hat.len());
        let dim = m + n;
        let mut a = DMatrix::zeros(dim, dim);
        for i in 0..m {
            for j in 0..m {
                a[(i, j)] = if i == j { -self.a[(i, i)] } else { self.a[(i, j)] };
            }
            for j in 0..n {
                a[(i, m + j)] = -self.b[(i, j)];
            }
        }
        for i in 0..n {
            for j in 0..n {
                a[(m + i, m + j)] = if i == j { -self.a_hat[(i, i)] } else { self.a_hat[(i, j)] };
            }
            for j in 0..m {
                a[(m + i, j)] = -self.b_hat[(i, j)];
            }
        }
        let b = CubicalTensor::from_fn(3, dim, |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            match (i < m, j < m, k < m) {
                (true, true, true) => {
                    let v = self.c[(i * m + j) * m + k];
                    if i == j && j == k { -v } else { v }
                }
                (true, false, false) => -self.d[(i * n + (j - m)) * n + (k - m)],
                (false, false, false) => {
                    let (i, j, k) = (i - m, j - m, k - m);
                    let v = self.c_hat[(i * n + j) * n + k];
                    if i == j && j == k { -v } else { v }
                }
                (false, true, true) => -self.d_hat[(((i - m) * m) + j) * m + k],
                _ => 0.0,
            }
        })?;
        let r = self.r.iter().chain(&self.r_hat).copied().collect();
        LvModel::new(Scenario::TwoFaction { m, n }, r, a, b)
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..=10.0)
}

/// Multipliers on the `[0, 10]` draws of a two-faction model. Self-limitation
/// terms (`a_ii`, `c_iii`) are never scaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactionScales {
    /// Intra-faction off-diagonal terms of `a`, `a_hat`, `c`, `c_hat`.
    pub cooperation: f64,
    /// Pairwise competition `b`, `b_hat`.
    pub cross: f64,
    /// Higher-order competition `d`, `d_hat`.
    pub cross_hoi: f64,
}

impl Default for FactionScales {
    fn default() -> Self {
        Self { cooperation: 1.0, cross: 1.0, cross_hoi: 1.0 }
    }
}

fn draw_two_faction(rng: &mut ChaCha8Rng, r: &[f64], m: usize, n: usize, s: &FactionScales) -> Result<LvModel, ModelError> {
    let mat = |rng: &mut ChaCha8Rng, p: usize, q: usize, off: f64, square: bool| {
        DMatrix::from_fn(p, q, |i, j| uniform(rng) * if square && i == j { 1.0 } else { off })
    };
    let cube = |rng: &mut ChaCha8Rng, p: usize, q: usize, off: f64, own: bool| -> Vec<f64> {
        (0..p * q * q)
            .map(|t| {
                let (i, j, k) = (t / (q * q), (t / q) % q, t % q);
                uniform(rng) * if own && i == j && j == k { 1.0 } else { off }
            })
            .collect()
    };
    TwoFactionParams {
        r: r[..m].to_vec(),
        r_hat: r[m..].to_vec(),
        a: mat(rng, m, m, s.cooperation, true),
        b: mat(rng, m, n, s.cross, false),
        a_hat: mat(rng, n, n, s.cooperation, true),
        b_hat: mat(rng, n, m, s.cross, false),
        c: cube(rng, m, m, s.cooperation, true),
        d: cube(rng, m, n, s.cross_hoi, false),
        c_hat: cube(rng, n, n, s.cooperation, true),
        d_hat: cube(rng, n, m, s.cross_hoi, false),
    }
    .build()
}

/// Two-faction model drawn like [`random_scenario`] with the off-diagonal
/// magnitudes multiplied by `scales`. Zero scales can leave `A` reducible,
/// which is reported rather than redrawn.
pub fn random_two_faction(m: usize, n: usize, seed: u64, scales: &FactionScales) -> Result<LvModel, ModelError> {
    if m == 0 || n == 0 {
        return Err(ModelError::Blocks { m, n, dim: m + n });
    }
    let zero = scales.cooperation == 0.0 || scales.cross == 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let r: Vec<f64> = (0..m + n).map(|_| rng.random_range(f64::MIN_POSITIVE..=10.0)).collect();
        match draw_two_faction(&mut rng, &r, m, n, scales) {
            Err(ModelError::Reducible) if !zero => continue,
            other => return other,
        }
    }
}

/// Seeded model with magnitudes uniform on `[0, 10]` placed with the
/// scenario's sign pattern. For two-faction models `dim` must equal `m + n`.
/// Draws with a reducible `A` are rejected and redrawn.
pub fn random_scenario(scenario: Scenario, dim: usize, seed: u64) -> Result<LvModel, ModelError> {
    if let Scenario::TwoFaction { m, n } = scenario {
        if m + n != dim || m == 0 || n == 0 {
            return Err(ModelError::Blocks { m, n, dim });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let r: Vec<f64> = (0..dim).map(|_| rng.random_range(f64::MIN_POSITIVE..=10.0)).collect();
        let candidate = match scenario {
            Scenario::TwoFaction { m, n } => draw_two_faction(&mut rng, &r, m, n, &FactionScales::default()),
            _ => {
                let sign = |rng: &mut ChaCha8Rng, diagonal: bool| -> f64 {
                    match scenario {
                        _ if diagonal => -1.0,
                        Scenario::Cooperative => 1.0,
                        Scenario::Competitive => -1.0,
                        _ => {
                            if rng.random_bool(0.5) {
                                1.0
                            } else {
                                -1.0
                            }
                        }
                    }
                };
                let mut a = DMatrix::zeros(dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        let mag = uniform(&mut rng);
                        a[(i, j)] = sign(&mut rng, i == j) * mag;
                    }
                }
                let mut entries = Vec::with_capacity(dim * dim * dim);
                for i in 0..dim {
                    for j in 0..dim {
                        for k in 0..dim {
                            let mag = uniform(&mut rng);
                            entries.push(sign(&mut rng, i == j && j == k) * mag);
                        }
                    }
                }
                LvModel::new(scenario, r.clone(), a, CubicalTensor::new(3, dim, entries)?)
            }
        };
        match candidate {
            Err(ModelError::Reducible) => continue,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn logistic() -> LvModel {
        LvModel::new(Scenario::General, vec![1.0], DMatrix::from_element(1, 1, -1.0), CubicalTensor::zeros(3, 1).unwrap())
            .unwrap()
    }

    #[test]
    fn rhs_examples() {
        let m = logistic();
        assert_eq!(m.rhs(&[0.0]).unwrap(), vec![0.0]);
        assert_eq!(m.rhs(&[1.0]).unwrap(), vec![0.0]);
        let (a, b) = (1.5, 2.5);
        let q = LvModel::new(
            Scenario::Competitive,
            vec![1.0],
            DMatrix::from_element(1, 1, -a),
            CubicalTensor::new(3, 1, vec![-b]).unwrap(),
        )
        .unwrap();
        let root = (-a + (a * a + 4.0 * b).sqrt()) / (2.0 * b);
        assert!(q.rhs(&[root]).unwrap()[0].abs() < 1e-14);
        assert!(matches!(m.rhs(&[1.0, 2.0]), Err(ModelError::StateLength { .. })));
    }

    #[test]
    fn jacobian_at_origin_is_diag_r() {
        let m = random_scenario(Scenario::General, 4, 3).unwrap();
        let j = m.jacobian(&[0.0; 4]).unwrap();
        assert_eq!(j, DMatrix::from_diagonal(&DVector::from_column_slice(m.r())));
    }

    #[test]
    fn jacobian_matches_central_differences() {
        for seed in 0..10 {
            let m = random_scenario(Scenario::General, 3, seed).unwrap();
            let x = [0.3, 0.7, 0.2];
            let j = m.jacobian(&x).unwrap();
            for c in 0..3 {
                let h = 1e-6;
                let mut xp = x;
                let mut xm = x;
                xp[c] += h;
                xm[c] -= h;
                let (fp, fm) = (m.rhs(&xp).unwrap(), m.rhs(&xm).unwrap());
                for r in 0..3 {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    assert!((fd - j[(r, c)]).abs() <= 1e-6 * j[(r, c)].abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn cooperative_jacobian_is_metzler() {
        let m = random_scenario(Scenario::Cooperative, 4, 11).unwrap();
        assert!(linalg::is_metzler(&m.jacobian(&[0.5, 0.1, 2.0, 1.0]).unwrap()));
    }

    #[test]
    fn random_scenarios_are_deterministic_and_patterned() {
        let a = random_scenario(Scenario::TwoFaction { m: 2, n: 3 }, 5, 42).unwrap();
        let b = random_scenario(Scenario::TwoFaction { m: 2, n: 3 }, 5, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_scenario(Scenario::TwoFaction { m: 2, n: 3 }, 5, 43).unwrap());
        // no x_i y_j products anywhere
        for i in 0..5 {
            assert_eq!(a.b().get(&[i, 0, 3]), 0.0);
            assert_eq!(a.b().get(&[i, 4, 1]), 0.0);
        }
        assert!(a.a()[(0, 1)] >= 0.0 && a.a()[(0, 2)] <= 0.0 && a.a()[(3, 0)] <= 0.0);
        let c = random_scenario(Scenario::Cooperative, 4, 1).unwrap();
        assert!(linalg::is_metzler(c.a()) && linalg::is_irreducible(c.a()));
        assert!(random_scenario(Scenario::TwoFaction { m: 2, n: 2 }, 5, 0).is_err());
    }

    #[test]
    fn sign_patterns_are_enforced() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, -0.5, 1.0, -1.0]);
        let b = CubicalTensor::zeros(3, 2).unwrap();
        assert!(LvModel::new(Scenario::Cooperative, vec![1.0, 1.0], a.clone(), b.clone()).is_err());
        assert!(LvModel::new(Scenario::Competitive, vec![1.0, 1.0], a.clone(), b.clone()).is_err());
        assert!(LvModel::new(Scenario::General, vec![1.0, 1.0], a.clone(), b.clone()).is_ok());
        assert!(LvModel::new(Scenario::General, vec![0.0, 1.0], a.clone(), b.clone()).is_err());
        let reducible = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 1.0, -1.0]);
        assert_eq!(LvModel::new(Scenario::Cooperative, vec![1.0, 1.0], reducible, b), Err(ModelError::Reducible));
    }

    #[test]
    fn model_file_round_trip() {
        let m = random_scenario(Scenario::TwoFaction { m: 1, n: 2 }, 3, 5).unwrap();
        let text = crate::io::to_json_pretty(&m);
        assert!(text.contains("\"blocks\""));
        let back: LvModel = crate::io::from_json_str(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn hoi_scaling_touches_only_cross_terms() {
        let m = random_scenario(Scenario::TwoFaction { m: 2, n: 3 }, 5, 8).unwrap();
        let s = m.scale_cross_hoi(0, 5.0).unwrap();
        assert_eq!(s.b().get(&[0, 3, 4]), 5.0 * m.b().get(&[0, 3, 4]));
        assert_eq!(s.b().get(&[0, 0, 1]), m.b().get(&[0, 0, 1]));
        assert_eq!(s.b().get(&[3, 0, 1]), m.b().get(&[3, 0, 1]));
    }

    #[test]
    fn self_regulation_dominates_cooperation() {
        let m = random_scenario(Scenario::Cooperative, 3, 2).unwrap().self_regulated(0.1).unwrap();
        for i in 0..3 {
            let rs = m.b().row_sums(i).unwrap();
            assert!(-m.b().get(&[i, i, i]) >= 1.1 * rs.plus - 1e-12);
        }
    }

    #[test]
    fn scaled_two_faction_draws() {
        let full = random_two_faction(2, 3, 11, &FactionScales::default()).unwrap();
        assert_eq!(full, random_scenario(Scenario::TwoFaction { m: 2, n: 3 }, 5, 11).unwrap());
        let weak = FactionScales { cooperation: 0.5, cross: 0.1, cross_hoi: 0.0 };
        let m = random_two_faction(2, 3, 11, &weak).unwrap();
        assert_eq!(m.scenario(), Scenario::TwoFaction { m: 2, n: 3 });
        assert_eq!(m.b().get(&[0, 2, 3]), 0.0);
        assert!((m.a()[(0, 2)] - 0.1 * full.a()[(0, 2)]).abs() < 1e-12);
        assert_eq!(m.a()[(1, 1)], full.a()[(1, 1)]);
        assert!(random_two_faction(0, 3, 1, &weak).is_err());
    }

}
