//! Deterministic fixtures for the benchmarks.

use holv_core::{CubicalTensor, PolySystem, QcpProblem};

fn is_diagonal(idx: &[usize]) -> bool {
    idx.iter().all(|&i| i == idx[0])
}

/// Z-tensor with a dominant diagonal. Off-diagonal entries follow a fixed
/// pseudo-random pattern so sizes compare like with like.
pub fn dominant_tensor(order: usize, n: usize) -> CubicalTensor {
    let off = |idx: &[usize]| {
        let h = idx.iter().fold(17usize, |h, &i| h.wrapping_mul(31).wrapping_add(i + 1));
        -((h % 97) as f64) / 97.0
    };
    let width = n.pow(order as u32 - 1) as f64;
    CubicalTensor::from_fn(order, n, |idx| if is_diagonal(idx) { width + 1.0 } else { off(idx) }).unwrap()
}

/// `A3 x^2 + A2 x = 1` with M-tensor terms.
pub fn m_system(n: usize) -> PolySystem {
    PolySystem::new(vec![dominant_tensor(3, n), dominant_tensor(2, n)], vec![1.0; n]).unwrap()
}

/// QCP with dominant `B` and `A` and `q = -1`.
pub fn qcp(n: usize) -> QcpProblem {
    let a = dominant_tensor(2, n).to_matrix().unwrap();
    QcpProblem::new(dominant_tensor(3, n), a, vec![-1.0; n]).unwrap()
}
