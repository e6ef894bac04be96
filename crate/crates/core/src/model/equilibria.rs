use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{permute_two_faction, LvModel, ModelError, Scenario};
use crate::linalg::{self, inf_dist, inf_norm};
use crate::pcp::{self, EnumerationOptions, Orientation};
use crate::poly::{self, PolySystem, SolveOptions};
use crate::tensor::shared_certificate;
use crate::tensor::CubicalTensor;

/// Real parts below `-HURWITZ_TOL` are stable, within `+-HURWITZ_TOL` marginal.
pub const HURWITZ_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictId {
    OriginUnstable,
    CooperativeBoundaryUnstable,
    CooperativeInteriorJx,
    OneFactionWins,
    SameFactionSubsetUnstable,
    CoexistencePermutedJacobian,
    MixedBoundaryLosers,
    CompetitiveBoundaryLosers,
    InwardPointing,
    SectorMinors,
    SectorMinorsEps,
    WeightedDominance,
    WeightedDominanceEps,
    UniquePositiveEquilibrium,
    SharedMCertificate,
    CooperativeGlobalStability,
    HPlusCompetitive,
    WinnerTakeAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    NotApplicable,
    /// Holds provided an assumption that is not checked numerically.
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub(crate) fn new(outcome: Outcome) -> Self {
        Self { outcome, witness: BTreeMap::new(), note: None }
    }

    pub(crate) fn holds_if(cond: bool) -> Self {
        Self::new(if cond { Outcome::Holds } else { Outcome::Fails })
    }

    pub(crate) fn with(mut self, key: &str, values: Vec<f64>) -> Self {
        self.witness.insert(key.to_string(), values);
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub type Verdicts = BTreeMap<VerdictId, Verdict>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EquilibriumKind {
    Origin,
    Interior,
    Boundary { support: Vec<usize> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub x_star: Vec<f64>,
    pub residual: f64,
    /// `[re, im]` pairs sorted by decreasing real part.
    pub jacobian_eigs: Vec<[f64; 2]>,
    pub max_real_part: f64,
    pub hurwitz: bool,
    /// Some real part lies within the Hurwitz tolerance of zero.
    pub marginal: bool,
    pub kind: EquilibriumKind,
    /// Complementarity orientations whose solution set contains the point;
    /// empty when the off-support growth rates have mixed signs.
    pub orientations: Vec<Orientation>,
    /// False when Newton refinement failed and the point is an unrefined guess.
    pub refined: bool,
    pub verdicts: Verdicts,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EquilibriumOptions {
    /// Bound on `||rhs(x*)||_inf`.
    pub tol: f64,
    pub enumeration: EnumerationOptions,
    pub solve: SolveOptions,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self { tol: 1e-8, enumeration: EnumerationOptions::default(), solve: SolveOptions::default() }
    }
}

fn support_of(x: &[f64]) -> Vec<usize> {
    (0..x.len()).filter(|&i| x[i] != 0.0).collect()
}

/// Newton on `L_S(x) = 0` with `x_{S^c} = 0`; `None` when it fails to reach
/// a root with `x_S > 0`.
pub fn refine_on_support(model: &LvModel, guess: &[f64], support: &[usize]) -> Option<Vec<f64>> {
    let n = model.dim();
    let s = support.len();
    let mut x = vec![0.0; n];
    for &i in support {
        x[i] = guess[i];
    }
    if s == 0 {
        return Some(x);
    }
    let residual = |x: &[f64]| -> Vec<f64> {
        let l = model.growth(x).expect("dim");
        support.iter().map(|&i| l[i]).collect()
    };
    let mut r = residual(&x);
    let mut rn = inf_norm(&r);
    for _ in 0..100 {
        if rn < 1e-14 * (1.0 + inf_norm(&x)).powi(2) {
            break;
        }
        let dl = model.a() + model.b().tvp_jacobian(&x).expect("dim");
        let jac = DMatrix::from_fn(s, s, |p, q| dl[(support[p], support[q])]);
        let Some(step) = jac.lu().solve(&DVector::from_iterator(s, r.iter().map(|v| -v))) else {
            break;
        };
        let mut lambda = 1.0;
        let mut moved = false;
        while lambda > 1e-6 {
            let mut cand = x.clone();
            for (p, &i) in support.iter().enumerate() {
                cand[i] += lambda * step[p];
            }
            let rc = residual(&cand);
            let rcn = inf_norm(&rc);
            if rcn < rn {
                (x, r, rn) = (cand, rc, rcn);
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let ok = rn < 1e-10 * (1.0 + inf_norm(&x)).powi(2) && support.iter().all(|&i| x[i] > 0.0);
    ok.then_some(x)
}

/// Classifies a point that must be an equilibrium to within `tol`.
pub fn classify_equilibrium(model: &LvModel, x_star: &[f64], tol: f64) -> Result<EquilibriumReport, ModelError> {
    let residual = inf_norm(&model.rhs(x_star)?);
    if !(residual < tol) {
        return Err(ModelError::NotEquilibrium { residual, tol });
    }
    Ok(report_at(model, x_star, true))
}

/// Report for `x` without the residual check; `refined` is recorded as given.
pub fn report_at(model: &LvModel, x: &[f64], refined: bool) -> EquilibriumReport {
    let n = model.dim();
    let residual = inf_norm(&model.rhs(x).expect("dim"));
    let jac = model.jacobian(x).expect("dim");
    let eigs = linalg::eigenvalues(&jac);
    let max_real_part = linalg::spectral_abscissa(&eigs);
    let support = support_of(x);
    let kind = match support.len() {
        0 => EquilibriumKind::Origin,
        s if s == n => EquilibriumKind::Interior,
        _ => EquilibriumKind::Boundary { support: support.clone() },
    };
    let growth = model.growth(x).expect("dim");
    let scale = 1.0 + inf_norm(x);
    let off: Vec<f64> = (0..n).filter(|i| x[*i] == 0.0).map(|i| growth[i]).collect();
    let mut orientations = Vec::new();
    if off.iter().all(|&l| l <= 1e-9 * scale) {
        orientations.push(Orientation::StableSide);
    }
    if off.iter().all(|&l| l >= -1e-9 * scale) {
        orientations.push(Orientation::UnstableSide);
    }
    let verdicts = point_verdicts(model, x, &support, &jac, &eigs);
    EquilibriumReport {
        x_star: x.to_vec(),
        residual,
        jacobian_eigs: eigs.iter().map(|e| [e.re, e.im]).collect(),
        max_real_part,
        hurwitz: max_real_part < -HURWITZ_TOL,
        marginal: eigs.iter().any(|e| e.re.abs() <= HURWITZ_TOL),
        kind,
        orientations,
        refined,
        verdicts,
    }
}

fn sub_abscissa(jac: &DMatrix<f64>, idx: &[usize]) -> f64 {
    let m = DMatrix::from_fn(idx.len(), idx.len(), |p, q| jac[(idx[p], idx[q])]);
    linalg::spectral_abscissa(&linalg::eigenvalues(&m))
}

/// Loser diagonal `D_i = r_i L_i(x*)` and the winner-block abscissa.
fn losers_and_winners(model: &LvModel, x: &[f64], support: &[usize], jac: &DMatrix<f64>) -> Verdict {
    let growth = model.growth(x).expect("dim");
    let losers: Vec<usize> = (0..model.dim()).filter(|i| !support.contains(i)).collect();
    let d: Vec<f64> = losers.iter().map(|&i| model.r()[i] * growth[i]).collect();
    let winner = sub_abscissa(jac, support);
    Verdict::holds_if(d.iter().all(|&v| v < 0.0) && winner < -HURWITZ_TOL)
        .with("losers", losers.iter().map(|&i| i as f64).collect())
        .with("d", d)
        .with("winner_abscissa", vec![winner])
}

fn point_verdicts(
    model: &LvModel,
    x: &[f64],
    support: &[usize],
    jac: &DMatrix<f64>,
    eigs: &[Complex<f64>],
) -> Verdicts {
    let n = model.dim();
    let mut v = Verdicts::new();
    let max_re = linalg::spectral_abscissa(eigs);
    if support.is_empty() {
        let min_re = eigs.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
        v.insert(
            VerdictId::OriginUnstable,
            Verdict::holds_if(min_re > HURWITZ_TOL)
                .with("eigenvalues_re", eigs.iter().map(|e| e.re).collect()),
        );
        return v;
    }
    let interior = support.len() == n;
    match model.scenario() {
        Scenario::General => {}
        Scenario::Cooperative => {
            if interior {
                let jx: Vec<f64> = (jac * DVector::from_column_slice(x)).iter().copied().collect();
                let holds = jx.iter().all(|&w| w < 0.0);
                let mut verdict = Verdict::holds_if(holds).with("jx", jx);
                if holds && max_re >= -HURWITZ_TOL {
                    verdict = verdict.note("J X* < 0 but the spectrum is not Hurwitz");
                }
                v.insert(VerdictId::CooperativeInteriorJx, verdict);
            } else {
                let growth = model.growth(x).expect("dim");
                let d: Vec<f64> = (0..n).filter(|i| x[*i] == 0.0).map(|i| model.r()[i] * growth[i]).collect();
                v.insert(
                    VerdictId::CooperativeBoundaryUnstable,
                    Verdict::holds_if(max_re > HURWITZ_TOL)
                        .with("d", d)
                        .with("winner_abscissa", vec![sub_abscissa(jac, support)])
                        .with("max_real_part", vec![max_re]),
                );
            }
        }
        Scenario::TwoFaction { m, n: k } => {
            if interior {
                let pjp = permute_two_faction(jac, m, k).expect("dims");
                let w: Vec<f64> = (&pjp * DVector::from_column_slice(x)).iter().copied().collect();
                v.insert(
                    VerdictId::CoexistencePermutedJacobian,
                    Verdict::holds_if(w.iter().all(|&u| u < 0.0))
                        .with("pjp_z_x", w[..m].to_vec())
                        .with("pjp_z_y", w[m..].to_vec()),
                );
            } else {
                let in_x = support.iter().filter(|&&i| i < m).count();
                let in_y = support.len() - in_x;
                if (in_x == m && in_y == 0) || (in_y == k && in_x == 0) {
                    v.insert(VerdictId::OneFactionWins, losers_and_winners(model, x, support, jac));
                } else if in_x == 0 || in_y == 0 {
                    v.insert(
                        VerdictId::SameFactionSubsetUnstable,
                        Verdict::holds_if(max_re > HURWITZ_TOL)
                            .with("winner_abscissa", vec![sub_abscissa(jac, support)])
                            .with("max_real_part", vec![max_re]),
                    );
                } else {
                    v.insert(VerdictId::MixedBoundaryLosers, losers_and_winners(model, x, support, jac));
                }
            }
        }
        Scenario::Competitive => {
            if !interior {
                v.insert(VerdictId::CompetitiveBoundaryLosers, losers_and_winners(model, x, support, jac));
            }
        }
    }
    v
}

fn sort_key(x: &[f64]) -> (usize, Vec<usize>) {
    let s = support_of(x);
    (s.len(), s)
}

/// Every equilibrium found by support enumeration (which covers both
/// complementarity orientations), by the S-tensor solver when `-A` and `-B`
/// share a certificate, and the origin; each refined and classified.
pub fn find_equilibria(model: &LvModel, opts: &EquilibriumOptions) -> Vec<EquilibriumReport> {
    let n = model.dim();
    assert!(n <= 12, "equilibrium enumeration is exponential in n");
    let mut candidates: Vec<Vec<f64>> = vec![vec![0.0; n]];
    let problem = pcp::lv_to_pcp(model, Orientation::StableSide);
    candidates.extend(pcp::support_roots(&problem, &opts.enumeration).into_iter().map(|s| s.x));

    let neg_a = CubicalTensor::from_matrix(&-model.a()).expect("finite");
    let neg_b = model.b().scale(-1.0).expect("finite");
    if let Some(v) = shared_certificate(&[&neg_a, &neg_b], None, 2000) {
        if let Ok(system) = PolySystem::new(vec![neg_a, neg_b], vec![1.0; n]) {
            if let Ok(res) = poly::solve_s_tensor(&system, Some(&v), opts.solve) {
                candidates.push(res.solution);
            }
        }
    }

    let mut reports: Vec<EquilibriumReport> = Vec::new();
    for guess in candidates {
        let support = support_of(&guess);
        let (x, refined) = match refine_on_support(model, &guess, &support) {
            Some(x) => (x, true),
            None => (guess, false),
        };
        if reports.iter().any(|r| inf_dist(&r.x_star, &x) < opts.enumeration.dedup_radius) {
            continue;
        }
        let mut report = report_at(model, &x, refined);
        if report.residual >= opts.tol {
            report.refined = false;
        }
        reports.push(report);
    }
    reports.sort_by(|a, b| {
        sort_key(&a.x_star)
            .cmp(&sort_key(&b.x_star))
            .then_with(|| a.x_star.iter().zip(&b.x_star).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal))
    });
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_scenario, TwoFactionParams};

    fn logistic() -> LvModel {
        LvModel::new(Scenario::General, vec![1.0], DMatrix::from_element(1, 1, -1.0), CubicalTensor::zeros(3, 1).unwrap())
            .unwrap()
    }

    #[test]
    fn logistic_has_two_equilibria() {
        let r = find_equilibria(&logistic(), &EquilibriumOptions::default());
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].kind, EquilibriumKind::Origin);
        assert!(!r[0].hurwitz);
        assert_eq!(r[0].verdicts[&VerdictId::OriginUnstable].outcome, Outcome::Holds);
        assert_eq!(r[1].x_star, vec![1.0]);
        assert!(r[1].hurwitz);
    }

    #[test]
    fn symmetric_system_as_model() {
        // 1 + Ax + Bx^2 = 0 is the symmetric system with A = -A2, B = -A3
        let sys = crate::poly::fixtures::symmetric_system();
        let a = -sys.terms()[0].to_matrix().unwrap();
        let b = sys.terms()[1].scale(-1.0).unwrap();
        let model = LvModel::new(Scenario::General, vec![1.0, 1.0], a, b).unwrap();
        let reports = find_equilibria(&model, &EquilibriumOptions::default());
        let root = (-1.0 + 41f64.sqrt()) / 20.0;
        assert_eq!(reports[0].kind, EquilibriumKind::Origin);
        assert!(reports.iter().any(|r| r.kind == EquilibriumKind::Interior && inf_dist(&r.x_star, &[root, root]) < 1e-12));
        for r in &reports {
            assert!(r.residual < 1e-8 && r.refined);
        }
    }

    #[test]
    fn rejects_non_equilibria() {
        assert!(matches!(classify_equilibrium(&logistic(), &[0.5], 1e-8), Err(ModelError::NotEquilibrium { .. })));
    }

    fn cooperative_pair() -> LvModel {
        // x1 alone settles at 1; the boundary point (1, 0) lets x2 invade
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.5, -2.0]);
        LvModel::new(Scenario::Cooperative, vec![1.0, 1.0], a, CubicalTensor::zeros(3, 2).unwrap()).unwrap()
    }

    #[test]
    fn cooperative_boundary_is_unstable() {
        let model = cooperative_pair();
        let r = classify_equilibrium(&model, &[1.0, 0.0], 1e-12).unwrap();
        assert!(!r.hurwitz);
        let v = &r.verdicts[&VerdictId::CooperativeBoundaryUnstable];
        assert_eq!(v.outcome, Outcome::Holds);
        assert!((v.witness["d"][0] - 1.5).abs() < 1e-12);
        let interior = find_equilibria(&model, &EquilibriumOptions::default())
            .into_iter()
            .find(|r| r.kind == EquilibriumKind::Interior)
            .unwrap();
        let jx = &interior.verdicts[&VerdictId::CooperativeInteriorJx];
        assert_eq!(jx.outcome, Outcome::Holds);
        assert!(interior.hurwitz);
    }

    #[test]
    fn one_faction_wins_with_strong_cross_competition() {
        let params = TwoFactionParams {
            r: vec![1.0],
            r_hat: vec![1.0],
            a: DMatrix::from_element(1, 1, 1.0),
            b: DMatrix::from_element(1, 1, 3.0),
            a_hat: DMatrix::from_element(1, 1, 1.0),
            b_hat: DMatrix::from_element(1, 1, 3.0),
            c: vec![0.0],
            d: vec![1.0],
            c_hat: vec![0.0],
            d_hat: vec![1.0],
        };
        let model = params.build().unwrap();
        let r = classify_equilibrium(&model, &[1.0, 0.0], 1e-12).unwrap();
        let v = &r.verdicts[&VerdictId::OneFactionWins];
        assert_eq!(v.outcome, Outcome::Holds);
        assert!((v.witness["d"][0] + 3.0).abs() < 1e-12);
        assert!(r.hurwitz);
    }

    #[test]
    fn reports_are_sorted_and_deterministic() {
        let model = random_scenario(Scenario::Competitive, 3, 4).unwrap();
        let a = find_equilibria(&model, &EquilibriumOptions::default());
        let b = find_equilibria(&model, &EquilibriumOptions::default());
        assert_eq!(crate::io::to_json_pretty(&a), crate::io::to_json_pretty(&b));
        assert_eq!(a[0].kind, EquilibriumKind::Origin);
        for r in &a {
            assert!(r.residual < 1e-8);
        }
    }
}
