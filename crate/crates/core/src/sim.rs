//! Adaptive Dormand-Prince 5(4) integration of Lotka-Volterra trajectories.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::inf_norm;
use crate::model::{refine_on_support, report_at, EquilibriumReport, LvModel, ModelError};

/// Components below this are treated as extinct when refining a limit.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("initial state must be finite and nonnegative")]
    BadInitialState,
    #[error("t_end must be positive")]
    BadHorizon,
    #[error("state became non-finite after t = {}", .last_good.times.last().copied().unwrap_or(0.0))]
    NonFinite { last_good: Box<Trajectory> },
    #[error("trajectory did not converge")]
    NotConverged,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Stop once `||rhs(x)||_inf` drops below this.
    pub conv_tol: f64,
    /// Stop once `||x||_inf` exceeds this.
    pub diverge_cap: f64,
    pub max_steps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12, conv_tol: 1e-9, diverge_cap: 1e6, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Terminal {
    Converged { guess: Vec<f64> },
    Diverged,
    MaxTime,
}

impl Terminal {
    pub fn label(&self) -> &'static str {
        match self {
            Terminal::Converged { .. } => "converged",
            Terminal::Diverged => "diverged",
            Terminal::MaxTime => "max_time",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClampEvent {
    pub t: f64,
    pub component: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub clamps: Vec<ClampEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub terminal: Terminal,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectories hold the initial state")
    }
}

// Dormand-Prince tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

fn rhs(model: &LvModel, x: &[f64]) -> Vec<f64> {
    model.rhs(x).expect("state length checked")
}

fn initial_step(model: &LvModel, x: &[f64], f: &[f64], opts: &SimOptions) -> f64 {
    let scale: Vec<f64> = x.iter().map(|v| opts.abs_tol + opts.rel_tol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
    let (d0, d1) = (norm(x), norm(f));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let x1: Vec<f64> = x.iter().zip(f).map(|(a, b)| a + h0 * b).collect();
    let f1 = rhs(model, &x1);
    let diff: Vec<f64> = f1.iter().zip(f).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

/// Integrates from `x0` up to `t_end`, stopping early on convergence or divergence.
///
/// Components that are exactly zero stay exactly zero; components that step
/// into `(-abs_tol, 0)` are clamped to zero and recorded. Steps that push a
/// component below `-abs_tol` are rejected.
pub fn simulate(model: &LvModel, x0: &[f64], t_end: f64, opts: &SimOptions) -> Result<Trajectory, SimError> {
    let n = model.dim();
    if x0.len() != n {
        return Err(ModelError::StateLength { expected: n, got: x0.len() }.into());
    }
    if x0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(SimError::BadInitialState);
    }
    if !(t_end > 0.0) {
        return Err(SimError::BadHorizon);
    }
    let mut stats = StepStats::default();
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut f = rhs(model, &x);
    stats.rhs_evals += 1;
    let mut traj_t = vec![0.0];
    let mut traj_x = vec![x.clone()];
    let finish = |times, states, terminal, stats| Ok(Trajectory { times, states, terminal, stats });

    if inf_norm(&f) < opts.conv_tol {
        return finish(traj_t, traj_x, Terminal::Converged { guess: x }, stats);
    }
    let mut h = initial_step(model, &x, &f, opts).min(t_end);
    stats.rhs_evals += 1;
    let mut err_old: f64 = 1e-4;
    let mut just_rejected = false;
    let mut k = vec![vec![0.0; n]; 7];

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return finish(traj_t, traj_x, Terminal::MaxTime, stats);
        }
        let h_step = h.min(t_end - t);
        k[0].clone_from(&f);
        for s in 1..7 {
            let stage: Vec<f64> = (0..n)
                .map(|i| x[i] + h_step * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>())
                .collect();
            k[s] = rhs(model, &stage);
        }
        stats.rhs_evals += 6;
        // the seventh stage is evaluated at the fifth-order solution
        let x_new: Vec<f64> = (0..n).map(|i| x[i] + h_step * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>()).collect();
        if x_new.iter().chain(&k[6]).any(|v| !v.is_finite()) {
            if h_step < 1e-14 * (1.0 + t) {
                let last_good = Trajectory { times: traj_t, states: traj_x, terminal: Terminal::MaxTime, stats };
                return Err(SimError::NonFinite { last_good: Box::new(last_good) });
            }
            h = h_step * FAC_MIN;
            stats.rejected += 1;
            just_rejected = true;
            continue;
        }
        let err = ((0..n)
            .map(|i| {
                let e = h_step * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                let sc = opts.abs_tol + opts.rel_tol * x[i].abs().max(x_new[i].abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / n as f64)
            .sqrt();
        let negative = x_new.iter().any(|&v| v < -opts.abs_tol);
        if err > 1.0 || negative {
            let fac = if negative { 0.5 } else { (SAFETY * err.powf(-0.2)).max(FAC_MIN) };
            h = h_step * fac;
            stats.rejected += 1;
            just_rejected = true;
            continue;
        }

        t = if h_step == t_end - t { t_end } else { t + h_step };
        x = x_new;
        f = k[6].clone();
        for (i, v) in x.iter_mut().enumerate() {
            if *v < 0.0 {
                stats.clamps.push(ClampEvent { t, component: i, value: *v });
                *v = 0.0;
            }
        }
        if stats.clamps.last().is_some_and(|c| c.t == t) {
            f = rhs(model, &x);
            stats.rhs_evals += 1;
        }
        stats.accepted += 1;
        traj_t.push(t);
        traj_x.push(x.clone());

        if inf_norm(&x) > opts.diverge_cap {
            return finish(traj_t, traj_x, Terminal::Diverged, stats);
        }
        if inf_norm(&f) < opts.conv_tol {
            return finish(traj_t, traj_x, Terminal::Converged { guess: x }, stats);
        }
        if t >= t_end {
            return finish(traj_t, traj_x, Terminal::MaxTime, stats);
        }

        let err_c = err.max(1e-10);
        let mut fac = SAFETY * err_c.powf(-ALPHA) * err_old.powf(BETA);
        fac = fac.clamp(FAC_MIN, if just_rejected { 1.0 } else { FAC_MAX });
        h = h_step * fac;
        err_old = err.max(1e-4);
        just_rejected = false;
    }
}

/// Refines the final state of a converged trajectory on its numerical
/// support and classifies it. When Newton fails the unrefined state is
/// returned with `refined = false`.
pub fn detect_limit(trajectory: &Trajectory, model: &LvModel) -> Result<EquilibriumReport, SimError> {
    let Terminal::Converged { guess } = &trajectory.terminal else {
        return Err(SimError::NotConverged);
    };
    let support: Vec<usize> = (0..guess.len()).filter(|&i| guess[i] >= SUPPORT_THRESHOLD).collect();
    let report = match refine_on_support(model, guess, &support) {
        Some(x) => report_at(model, &x, true),
        None => {
            let x: Vec<f64> = guess.iter().map(|&v| if v >= SUPPORT_THRESHOLD { v } else { 0.0 }).collect();
            report_at(model, &x, false)
        }
    };
    Ok(report)
}

/// `t,x1,...,xn` rows for every accepted step and a closing terminal comment.
pub fn write_csv<W: Write>(trajectory: &Trajectory, mut out: W) -> std::io::Result<()> {
    let n = trajectory.states.first().map_or(0, Vec::len);
    let header: Vec<String> = std::iter::once("t".to_string()).chain((1..=n).map(|i| format!("x{i}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for (t, x) in trajectory.times.iter().zip(&trajectory.states) {
        let row: Vec<String> = std::iter::once(t.to_string()).chain(x.iter().map(|v| v.to_string())).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    writeln!(out, "# terminal: {}", trajectory.terminal.label())
}

/// Initial conditions uniform on `(0, hi]`, one counter-based stream per run.
pub fn random_initial_conditions(dim: usize, count: usize, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(run as u64);
            (0..dim).map(|_| hi - rng.random_range(0.0..hi)).collect()
        })
        .collect()
}

/// Runs independent simulations in parallel; results keep input order.
pub fn simulate_batch(
    model: &LvModel,
    initial: &[Vec<f64>],
    t_end: f64,
    opts: &SimOptions,
) -> Vec<Result<Trajectory, SimError>> {
    initial.par_iter().map(|x0| simulate(model, x0, t_end, opts)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: usize,
    pub seed: Option<u64>,
    pub x0: Vec<f64>,
    pub terminal: String,
    pub t_final: f64,
    pub limit: Option<Vec<f64>>,
    pub limit_hurwitz: Option<bool>,
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub runs: Vec<RunRecord>,
}
