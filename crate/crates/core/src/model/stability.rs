//! Model-level stability conditions and the matrix tools they rely on.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::equilibria::{Outcome, Verdict, VerdictId, Verdicts};
use super::{LvModel, ModelError, Scenario};
use crate::linalg;
use crate::poly::{self, PolySystem, SolveOptions};
use crate::tensor::{certifies, classify, shared_certificate, ClassifyOptions};
use crate::tensor::CubicalTensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetzlerCertificate {
    /// Positive `z` with `Mz = -1`, present exactly when `M` is Hurwitz
    /// (for irreducible `M`).
    pub z: Option<Vec<f64>>,
    pub singular: bool,
}

/// Solves `Mz = -1` for a Metzler `M`; a positive solution certifies that
/// `M` is Hurwitz.
pub fn metzler_hurwitz_certificate(m: &DMatrix<f64>) -> Result<MetzlerCertificate, ModelError> {
    if m.nrows() != m.ncols() || !linalg::is_metzler(m) {
        return Err(ModelError::NotMetzler);
    }
    let n = m.nrows();
    Ok(match linalg::solve(m, &vec![-1.0; n]) {
        None => MetzlerCertificate { z: None, singular: true },
        Some(z) => MetzlerCertificate { z: z.iter().all(|&v| v > 0.0).then_some(z), singular: false },
    })
}

/// `P J P` with `P = diag(I_m, -I_n)`: flips the sign of both off-diagonal blocks.
pub fn permute_two_faction(j: &DMatrix<f64>, m: usize, n: usize) -> Result<DMatrix<f64>, ModelError> {
    let dim = m + n;
    if j.nrows() != dim || j.ncols() != dim {
        return Err(ModelError::Blocks { m, n, dim: j.nrows() });
    }
    Ok(DMatrix::from_fn(dim, dim, |r, c| if (r < m) == (c < m) { j[(r, c)] } else { -j[(r, c)] }))
}

/// Permuted Jacobian of a two-faction model at a positive state, which must be Metzler.
pub fn permuted_jacobian(model: &LvModel, x: &[f64]) -> Result<DMatrix<f64>, ModelError> {
    let Scenario::TwoFaction { m, n } = model.scenario() else {
        return Err(ModelError::WrongScenario { expected: "two_faction" });
    };
    let p = permute_two_faction(&model.jacobian(x)?, m, n)?;
    if x.iter().all(|&v| v > 0.0) && !linalg::is_metzler(&p) {
        return Err(ModelError::NotMetzler);
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WtaReport {
    pub condition_a: bool,
    pub condition_b: bool,
    /// `(i, j)` pairs violating either condition.
    pub failing_pairs: Vec<(usize, usize)>,
    /// Predicted global attractor when both conditions hold.
    pub limit: Option<Vec<f64>>,
    /// `a_11 x_1*`, the limit relative to the pairwise carrying capacity `1/a_11`.
    pub bound_ratio: Option<f64>,
    /// Growth factors `L_j` of the absent species at the predicted limit.
    pub invasion_rates: Vec<f64>,
}

/// Checks the winner-take-all ordering conditions on the competition magnitudes
/// `a_ij = -A_ij`: `a_ij < a_jj` for `i < j` and `a_ij > a_jj` for `i > j`.
pub fn wta_check(model: &LvModel) -> Result<WtaReport, ModelError> {
    if model.scenario() != Scenario::Competitive {
        return Err(ModelError::WrongScenario { expected: "competitive" });
    }
    let n = model.dim();
    let a = |i: usize, j: usize| -model.a()[(i, j)];
    let mut failing_pairs = Vec::new();
    let (mut condition_a, mut condition_b) = (true, true);
    for i in 0..n {
        for j in 0..n {
            if i < j && !(a(i, j) < a(j, j)) {
                condition_a = false;
                failing_pairs.push((i, j));
            }
            if i > j && !(a(i, j) > a(j, j)) {
                condition_b = false;
                failing_pairs.push((i, j));
            }
        }
    }
    let (a11, b111) = (a(0, 0), -model.b().get(&[0, 0, 0]));
    let x1 = if b111 < 1e-14 {
        (a11 > 0.0).then(|| 1.0 / a11)
    } else {
        Some(2.0 / (a11 + (a11 * a11 + 4.0 * b111).sqrt()))
    };
    let limit = match x1 {
        Some(x1) if condition_a && condition_b => {
            let mut x = vec![0.0; n];
            x[0] = x1;
            Some(x)
        }
        _ => None,
    };
    let invasion_rates = match &limit {
        Some(x) => model.growth(x)?[1..].to_vec(),
        None => Vec::new(),
    };
    Ok(WtaReport {
        condition_a,
        condition_b,
        failing_pairs,
        bound_ratio: limit.as_ref().map(|x| a11 * x[0]),
        limit,
        invasion_rates,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlobalOptions {
    /// Radius of the invariant box `W`.
    pub r_hat: f64,
    /// Lower bound on every component inside `W`.
    pub eps: f64,
    /// Row weights of the dominance inequalities; defaults to all ones.
    pub d: Option<Vec<f64>>,
    pub classify: ClassifyOptions,
    pub solve: SolveOptions,
}

impl GlobalOptions {
    pub fn new(r_hat: f64, eps: f64) -> Self {
        Self { r_hat, eps, d: None, classify: ClassifyOptions::default(), solve: SolveOptions::default() }
    }
}

/// `|b_ijk| + |b_ikj|` summed over `k`.
fn hoi_coupling(b: &CubicalTensor, i: usize, j: usize) -> f64 {
    (0..b.dim()).map(|k| b.get(&[i, j, k]).abs() + b.get(&[i, k, j]).abs()).sum()
}

/// Entrywise bound on the off-diagonal Jacobian of `F_i = r_i L_i` over `W`.
fn sector_off_diagonal(model: &LvModel, r_hat: f64) -> DMatrix<f64> {
    let n = model.dim();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            model.r()[i] * (model.a()[(i, j)].abs() + r_hat * hoi_coupling(model.b(), i, j))
        }
    })
}

fn minors_verdict(g: &DMatrix<f64>) -> Verdict {
    let report = linalg::leading_principal_minors(&-g);
    let mut v = Verdict::holds_if(report.all_positive).with("minors_of_neg_g", report.minors);
    if report.ill_conditioned {
        v = v.note("some leading block is ill-conditioned; minors above size 8 come from LU");
    }
    v
}

fn dominance_slack(model: &LvModel, d: &[f64], r_hat: f64, eps: Option<f64>) -> Vec<f64> {
    let n = model.dim();
    let (a, b) = (model.a(), model.b());
    (0..n)
        .map(|i| {
            let diag = a[(i, i)] + eps.map_or(0.0, |e| b.get(&[i, i, i]) * e);
            let pair: f64 = (0..n).filter(|&j| j != i).map(|j| d[j] * a[(i, j)].abs()).sum();
            let hoi: f64 = (0..n)
                .flat_map(|j| (0..n).map(move |k| (j, k)))
                .filter(|&(j, k)| match eps {
                    None => j != i,
                    Some(_) => (j, k) != (i, i),
                })
                .map(|(j, k)| d[j] * (b.get(&[i, j, k]).abs() + b.get(&[i, k, j]).abs()))
                .sum();
            -d[i] * diag - pair - r_hat * hoi
        })
        .collect()
}

fn dominance_verdict(slack: Vec<f64>) -> Verdict {
    let failing: Vec<f64> = (0..slack.len()).filter(|&i| !(slack[i] > 0.0)).map(|i| i as f64).collect();
    let mut v = Verdict::holds_if(failing.is_empty()).with("row_slack", slack);
    if !failing.is_empty() {
        v = v.note(format!("inequality fails on rows {failing:?}"));
    }
    v.with("failing_rows", failing)
}

fn not_applicable(reason: &str) -> Verdict {
    Verdict::new(Outcome::NotApplicable).note(reason)
}

/// Evaluates every model-level existence, uniqueness and global stability
/// condition that applies to the model's scenario.
pub fn global_stability_conditions(model: &LvModel, opts: &GlobalOptions) -> Result<Verdicts, ModelError> {
    let n = model.dim();
    if !(opts.r_hat > opts.eps && opts.eps > 0.0) {
        return Err(ModelError::BadBox { r_hat: opts.r_hat, eps: opts.eps });
    }
    let d = opts.d.clone().unwrap_or_else(|| vec![1.0; n]);
    if d.len() != n {
        return Err(ModelError::StateLength { expected: n, got: d.len() });
    }
    let (a, b) = (model.a(), model.b());
    let diag_a_negative = (0..n).all(|i| a[(i, i)] < 0.0);
    let diag_b_negative = (0..n).all(|i| b.get(&[i, i, i]) < 0.0);
    let b_nonpositive = b.entries().iter().all(|&v| v <= 0.0);
    let mut out = Verdicts::new();

    let off = sector_off_diagonal(model, opts.r_hat);
    let g5 = DMatrix::from_fn(n, n, |i, j| if i == j { model.r()[i] * a[(i, i)] } else { off[(i, j)] });
    let g6 = DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            return off[(i, j)];
        }
        let positive: f64 = (0..n).map(|k| b.get(&[i, k, i]).max(0.0) + b.get(&[i, i, k]).max(0.0)).sum();
        model.r()[i] * (a[(i, i)] + b.get(&[i, i, i]) * opts.eps + opts.r_hat * positive)
    });

    let inward = if diag_a_negative {
        let mut v = minors_verdict(&g5);
        if v.outcome == Outcome::Holds {
            v.outcome = Outcome::Conditional;
        }
        v.note("requires F to point inward on the boundary of W, which is not checked")
    } else {
        not_applicable("needs a_ii < 0")
    };
    out.insert(VerdictId::InwardPointing, inward);

    if diag_a_negative && b_nonpositive {
        out.insert(VerdictId::SectorMinors, minors_verdict(&g5));
        out.insert(VerdictId::WeightedDominance, dominance_verdict(dominance_slack(model, &d, opts.r_hat, None)));
    } else {
        out.insert(VerdictId::SectorMinors, not_applicable("needs a_ii < 0 and B <= 0"));
        out.insert(VerdictId::WeightedDominance, not_applicable("needs a_ii < 0 and B <= 0"));
    }
    if diag_a_negative && diag_b_negative {
        let diag_ok = (0..n).all(|i| g6[(i, i)] < 0.0);
        let mut v = minors_verdict(&g6);
        if !diag_ok {
            v.outcome = Outcome::Fails;
            v = v.note("some bound g_ii is not negative");
        }
        out.insert(VerdictId::SectorMinorsEps, v.with("g_diag", (0..n).map(|i| g6[(i, i)]).collect()));
        let slack = dominance_slack(model, &d, opts.r_hat, Some(opts.eps));
        out.insert(VerdictId::WeightedDominanceEps, dominance_verdict(slack));
    } else {
        out.insert(VerdictId::SectorMinorsEps, not_applicable("needs a_ii < 0 and b_iii < 0"));
        out.insert(VerdictId::WeightedDominanceEps, not_applicable("needs a_ii < 0 and b_iii < 0"));
    }

    let neg_a = CubicalTensor::from_matrix(&-a)?;
    let neg_b = b.scale(-1.0)?;
    let hint = opts.classify.certificate_hint.as_deref();
    let shared = shared_certificate(&[&neg_a, &neg_b], hint, 2000);
    out.insert(
        VerdictId::UniquePositiveEquilibrium,
        match &shared {
            Some(v) => Verdict::new(Outcome::Holds).with("certificate", v.clone()),
            None => Verdict::new(Outcome::Fails).note("no shared S-certificate of -A and -B was found"),
        },
    );

    match model.scenario() {
        Scenario::Cooperative => {
            let ra = classify(&neg_a, &opts.classify);
            let rb = classify(&neg_b, &opts.classify);
            let cert = shared.clone().filter(|v| certifies(&[&neg_a, &neg_b], v));
            let hyp = ra.is_m_tensor && ra.is_irreducible && rb.is_m_tensor && rb.is_irreducible && cert.is_some();
            let mut v = Verdict::holds_if(hyp).with(
                "flags",
                [ra.is_m_tensor, ra.is_irreducible, rb.is_m_tensor, rb.is_irreducible].map(f64::from).to_vec(),
            );
            if let Some(c) = &cert {
                v = v.with("certificate", c.clone());
            }
            out.insert(VerdictId::SharedMCertificate, v);
            out.insert(VerdictId::CooperativeGlobalStability, cooperative_follow_up(&neg_a, &neg_b, cert.filter(|_| hyp), opts.solve));
        }
        Scenario::Competitive => {
            let ra = classify(&neg_a, &opts.classify);
            let rb = classify(&neg_b, &opts.classify);
            let holds = ra.is_h_plus && ra.is_irreducible && rb.is_h_plus && rb.is_irreducible;
            let mut v = Verdict::holds_if(holds)
                .with("flags", [ra.is_h_plus, ra.is_irreducible, rb.is_h_plus, rb.is_irreducible].map(f64::from).to_vec());
            if let (Some(x), Some(y)) = (ra.spectral_radius_of_majorant, rb.spectral_radius_of_majorant) {
                v = v.with("majorant_radii", vec![x, y]).with("shifts", vec![ra.comparison_shift, rb.comparison_shift]);
            }
            out.insert(VerdictId::HPlusCompetitive, v);

            let wta = wta_check(model)?;
            let mut v = Verdict::holds_if(wta.limit.is_some());
            if let Some(limit) = &wta.limit {
                v = v.with("limit", limit.clone()).with("invasion_rates", wta.invasion_rates.clone());
                if wta.invasion_rates.iter().any(|&l| l >= 0.0) {
                    v = v.note("the predicted limit can be invaded: some absent species has L_j >= 0 there");
                }
            } else {
                let pairs: Vec<f64> = wta.failing_pairs.iter().flat_map(|&(i, j)| [i as f64, j as f64]).collect();
                v = v.with("failing_pairs", pairs);
            }
            out.insert(VerdictId::WinnerTakeAll, v);
        }
        _ => {}
    }
    Ok(out)
}

/// Solves for the positive equilibrium and checks `-Ax* > 0`, `-B(x*)^2 > 0`.
fn cooperative_follow_up(
    neg_a: &CubicalTensor,
    neg_b: &CubicalTensor,
    cert: Option<Vec<f64>>,
    opts: SolveOptions,
) -> Verdict {
    let Some(v) = cert else {
        return not_applicable("needs the shared M-certificate hypotheses");
    };
    let n = neg_a.dim();
    let solved = PolySystem::new(vec![neg_a.clone(), neg_b.clone()], vec![1.0; n])
        .ok()
        .and_then(|s| poly::solve_s_tensor(&s, Some(&v), opts).ok());
    let Some(res) = solved else {
        return Verdict::new(Outcome::Fails).note("the positive equilibrium could not be computed");
    };
    let x = res.solution;
    let ax = neg_a.tvp(&x).expect("dim");
    let bx = neg_b.tvp(&x).expect("dim");
    Verdict::holds_if(ax.iter().chain(&bx).all(|&w| w > 0.0))
        .with("x_star", x)
        .with("neg_a_x", ax)
        .with("neg_b_x2", bx)
}
