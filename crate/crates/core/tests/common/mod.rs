//! Seeded instance generators shared by the integration suites.
#![allow(dead_code)]

use holv_core::model::{random_scenario, random_two_faction, FactionScales, LvModel, Scenario};
use holv_core::poly::PolySystem;
use holv_core::{CubicalTensor, QcpProblem};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn random_tensor(rng: &mut ChaCha8Rng, order: usize, n: usize, lo: f64, hi: f64) -> CubicalTensor {
    let len = n.pow(order as u32);
    CubicalTensor::new(order, n, random_vec(rng, len, lo, hi)).unwrap()
}

/// Off-diagonal entries in `[-1, 1]`; each diagonal entry exceeds the
/// row's negative off-diagonal mass by a margin in `[0.2, 2]`.
pub fn sdd_tensor(rng: &mut ChaCha8Rng, order: usize, n: usize) -> CubicalTensor {
    let mut t = random_tensor(rng, order, n, -1.0, 1.0);
    for i in 0..n {
        let minus = t.row_sums(i).unwrap().minus;
        let margin = rng.random_range(0.2..2.0);
        t = t.with_entry(&vec![i; order], minus + margin).unwrap();
    }
    t
}

/// QCP with generalized row-SDD `B`, `A` (positive diagonals) and `q < 0`.
pub fn sdd_qcp(seed: u64) -> QcpProblem {
    let mut r = rng(seed);
    let n = r.random_range(1..=4);
    let b = sdd_tensor(&mut r, 3, n);
    let a = sdd_tensor(&mut r, 2, n).to_matrix().unwrap();
    let q = random_vec(&mut r, n, -5.0, -0.1);
    QcpProblem::new(b, a, q).unwrap()
}

/// `A3 x^2 + A2 x = b` with Z-tensor terms whose diagonals dominate, so every
/// term is a nonsingular M-tensor.
pub fn m_system(seed: u64) -> PolySystem {
    let mut r = rng(seed);
    let n = r.random_range(1..=4);
    let z = |r: &mut ChaCha8Rng, order: usize| {
        let t = random_tensor(r, order, n, -1.0, 0.0);
        let mut t = t.map_indexed(|idx, v| if idx.iter().all(|&i| i == idx[0]) { 0.0 } else { v }).unwrap();
        for i in 0..n {
            let off = t.off_diagonal_abs_sum(i);
            let margin = r.random_range(0.2..2.0);
            t = t.with_entry(&vec![i; order], off + margin).unwrap();
        }
        t
    };
    let a3 = z(&mut r, 3);
    let a2 = z(&mut r, 2);
    let b = random_vec(&mut r, n, 0.1, 5.0);
    PolySystem::new(vec![a3, a2], b).unwrap()
}

/// Random cooperative model with the cubic self-limitation strengthened so
/// that trajectories stay bounded.
pub fn bounded_cooperative(seed: u64, n: usize) -> LvModel {
    random_scenario(Scenario::Cooperative, n, seed).unwrap().self_regulated(0.1).unwrap()
}

/// Two-faction family with weak cross-faction coupling.
pub const WEAK_CROSS: FactionScales = FactionScales { cooperation: 0.05, cross: 0.05, cross_hoi: 0.05 };

/// Two-faction family with strong pairwise competition between factions.
pub const STRONG_CROSS: FactionScales = FactionScales { cooperation: 0.05, cross: 2.0, cross_hoi: 0.2 };

pub fn bounded_two_faction(seed: u64, m: usize, n: usize) -> LvModel {
    random_two_faction(m, n, seed, &WEAK_CROSS).unwrap().self_regulated(0.1).unwrap()
}

/// Central-difference Jacobian of `f` at `x`.
pub fn finite_difference<F: Fn(&[f64]) -> Vec<f64>>(f: F, x: &[f64], h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut jac = DMatrix::zeros(f(x).len(), n);
    for c in 0..n {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for r in 0..fp.len() {
            jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    jac
}

/// Largest entrywise gap relative to `max(1, |entry|)`.
pub fn relative_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs() / x.abs().max(1.0)).fold(0.0, f64::max)
}
