use serde::{Deserialize, Serialize};

use super::{is_diagonal, spectral_radius_nonneg, CubicalTensor, SpectralOptions};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub spectral: SpectralOptions,
    /// Tried first by the S-certificate search.
    pub certificate_hint: Option<Vec<f64>>,
    pub certificate_max_iter: usize,
}

impl ClassifyOptions {
    pub fn with_hint(hint: Vec<f64>) -> Self {
        Self { certificate_hint: Some(hint), ..Self::default() }
    }
}

/// Every class predicate, evaluated constructively.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TensorClassReport {
    pub order: usize,
    pub dim: usize,
    pub is_metzler: bool,
    pub is_diag_dominant: bool,
    pub is_strictly_diag_dominant: bool,
    pub is_m_tensor: bool,
    pub is_nonsingular_m: bool,
    pub is_h_tensor: bool,
    pub is_h_plus: bool,
    pub is_generalized_row_sdd_pos_diag: bool,
    pub is_irreducible: bool,
    /// `None` means "not certified", which is not the same as "not S".
    pub s_certificate: Option<Vec<f64>>,
    /// `s = max diagonal of the comparison tensor`.
    pub comparison_shift: f64,
    /// `rho(s I - <A>)`.
    pub spectral_radius_of_majorant: Option<f64>,
}

/// Evaluates the classification ladder for `a`.
///
/// The M-test needs nonpositive off-diagonals, then takes `s = max_i a_{i..i}`
/// and compares it with `rho(s I - A)`. The H-test is the M-test on the
/// comparison tensor.
pub fn classify(a: &CubicalTensor, opts: &ClassifyOptions) -> TensorClassReport {
    let n = a.dim();
    let diag = a.diagonal();
    let off: Vec<f64> = (0..n).map(|i| a.off_diagonal_abs_sum(i)).collect();
    let is_diag_dominant = diag.iter().zip(&off).all(|(d, o)| d.abs() >= *o);
    let is_strictly_diag_dominant = diag.iter().zip(&off).all(|(d, o)| d.abs() > *o);
    let is_generalized_row_sdd_pos_diag = (0..n).all(|i| {
        let minus = a.row_sums(i).map(|s| s.minus).unwrap_or(f64::INFINITY);
        diag[i] > 0.0 && diag[i].abs() - minus > 0.0
    });

    let m_test = m_test(a, opts.spectral);
    let comparison = a.comparison();
    let h_test = m_test_z(&comparison, opts.spectral);
    let is_h_plus = h_test.nonsingular && diag.iter().all(|&d| d > 0.0);

    let mut hints: Vec<Vec<f64>> = Vec::new();
    if let Some(h) = &opts.certificate_hint {
        hints.push(h.clone());
    }
    hints.push(vec![1.0; n]);
    // Perron vector of the comparison majorant certifies H+ tensors
    if let Some(v) = h_test.vector.clone() {
        hints.push(v);
    }
    let max_iter = if opts.certificate_max_iter == 0 { 10_000 } else { opts.certificate_max_iter };
    let s_certificate = search_certificate(&[a], &hints, max_iter);

    TensorClassReport {
        order: a.order(),
        dim: n,
        is_metzler: a.is_metzler(),
        is_diag_dominant,
        is_strictly_diag_dominant,
        is_m_tensor: m_test.is_m,
        is_nonsingular_m: m_test.nonsingular,
        is_h_tensor: h_test.is_m,
        is_h_plus,
        is_generalized_row_sdd_pos_diag,
        is_irreducible: a.is_irreducible(),
        s_certificate,
        comparison_shift: h_test.shift,
        spectral_radius_of_majorant: h_test.rho,
    }
}

struct MTest {
    is_m: bool,
    nonsingular: bool,
    shift: f64,
    rho: Option<f64>,
    vector: Option<Vec<f64>>,
}

fn m_test(a: &CubicalTensor, opts: SpectralOptions) -> MTest {
    if !a.has_nonpositive_off_diagonal() {
        return MTest { is_m: false, nonsingular: false, shift: f64::NAN, rho: None, vector: None };
    }
    m_test_z(a, opts)
}

/// M-test for a tensor already known to have nonpositive off-diagonals.
fn m_test_z(a: &CubicalTensor, opts: SpectralOptions) -> MTest {
    let s = a.diagonal().into_iter().fold(f64::NEG_INFINITY, f64::max);
    let majorant = a
        .map_indexed(|idx, v| if is_diagonal(idx) { s - v } else { -v })
        .expect("finite");
    match spectral_radius_nonneg(&majorant, opts) {
        Ok(est) => MTest {
            is_m: s >= est.lower,
            nonsingular: s > est.upper,
            shift: s,
            rho: Some(est.rho),
            vector: Some(est.vector),
        },
        Err(super::TensorError::NoConvergence { upper, .. }) => MTest {
            is_m: s >= upper,
            nonsingular: s > upper,
            shift: s,
            rho: None,
            vector: None,
        },
        Err(_) => MTest { is_m: false, nonsingular: false, shift: s, rho: None, vector: None },
    }
}

/// Searches for `v > 0` with `A v^{m-1} > 0`.
///
/// Strategy order: `hint`, the all-ones vector, then multiplicative
/// (exponentiated-gradient) ascent of a smoothed `min_i (A v^{m-1})_i` over
/// the simplex. `None` means no certificate was found.
pub fn s_tensor_certificate(a: &CubicalTensor, hint: Option<&[f64]>, max_iter: usize) -> Option<Vec<f64>> {
    let hints: Vec<Vec<f64>> = hint.map(|h| vec![h.to_vec()]).unwrap_or_default();
    search_certificate(&[a], &hints, max_iter)
}

/// Shared certificate for several tensors of the same dimension:
/// `v > 0` with `A_t v^{m_t - 1} > 0` for every `t`.
pub fn shared_certificate(tensors: &[&CubicalTensor], hint: Option<&[f64]>, max_iter: usize) -> Option<Vec<f64>> {
    let hints: Vec<Vec<f64>> = hint.map(|h| vec![h.to_vec()]).unwrap_or_default();
    search_certificate(tensors, &hints, max_iter)
}

/// Exact check used for every returned certificate.
pub fn certifies(tensors: &[&CubicalTensor], v: &[f64]) -> bool {
    if v.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return false;
    }
    tensors.iter().all(|t| match t.tvp(v) {
        Ok(y) => y.iter().all(|&yi| yi > 0.0),
        Err(_) => false,
    })
}

fn search_certificate(tensors: &[&CubicalTensor], hints: &[Vec<f64>], max_iter: usize) -> Option<Vec<f64>> {
    let n = tensors.first()?.dim();
    if tensors.iter().any(|t| t.dim() != n) {
        return None;
    }
    for h in hints {
        if h.len() == n && certifies(tensors, h) {
            return Some(h.clone());
        }
    }
    let ones = vec![1.0; n];
    if certifies(tensors, &ones) {
        return Some(ones);
    }
    // a row with no positive entry can never be made positive
    for t in tensors {
        let row_len = t.row_len();
        if t.entries().chunks_exact(row_len).any(|row| row.iter().all(|&v| v <= 0.0)) {
            return None;
        }
    }
    ascend(tensors, max_iter)
}

/// Row scales so that every component of the objective is O(1).
fn row_scales(t: &CubicalTensor) -> Vec<f64> {
    t.entries()
        .chunks_exact(t.row_len())
        .map(|row| {
            let s: f64 = row.iter().map(|v| v.abs()).sum();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect()
}

fn ascend(tensors: &[&CubicalTensor], max_iter: usize) -> Option<Vec<f64>> {
    let n = tensors[0].dim();
    let scales: Vec<Vec<f64>> = tensors.iter().map(|t| row_scales(t)).collect();
    let mut v = vec![1.0 / n as f64; n];
    let mut step = 0.5;
    let mut temperature = 0.05;
    let mut best = f64::NEG_INFINITY;

    let objective = |v: &[f64], temperature: f64| -> (f64, f64, Vec<f64>) {
        // (hard min, smoothed min, gradient of smoothed min)
        let mut values = Vec::new();
        let mut grads = Vec::new();
        for (t, s) in tensors.iter().zip(&scales) {
            // degree-normalised so terms of different order are comparable
            let deg = (t.order() - 1) as f64;
            let y = t.tvp(v).expect("dim");
            let jac = t.tvp_jacobian(v).expect("dim");
            for i in 0..n {
                let h = y[i] / s[i];
                let scale = v.iter().sum::<f64>().powf(deg);
                values.push(h / scale);
                grads.push((0..n).map(|j| jac[(i, j)] / s[i] / scale).collect::<Vec<f64>>());
            }
        }
        let hard = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = values.iter().map(|h| (-(h - hard) / temperature).exp()).collect();
        let z: f64 = weights.iter().sum();
        let smooth = hard - temperature * z.ln();
        let mut grad = vec![0.0; n];
        for (w, g) in weights.iter().zip(&grads) {
            for j in 0..n {
                grad[j] += w / z * g[j];
            }
        }
        (hard, smooth, grad)
    };

    for _ in 0..max_iter {
        if certifies(tensors, &v) {
            return Some(v);
        }
        let (hard, _, grad) = objective(&v, temperature);
        if hard > best {
            best = hard;
        } else {
            step *= 0.995;
            temperature = (temperature * 0.995).max(1e-6);
        }
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax == 0.0 || step < 1e-12 {
            break;
        }
        let mut next: Vec<f64> = v.iter().zip(&grad).map(|(&vi, &g)| vi * (step * g / gmax).exp()).collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x = (*x / s).max(1e-300));
        v = next;
    }
    certifies(tensors, &v).then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_minus_one() -> CubicalTensor {
        CubicalTensor::from_fn(3, 2, |idx| if is_diagonal(idx) { 11.0 } else { -1.0 }).unwrap()
    }

    /// Second worked tensor: A111=A222=11, A112=A122=A211=A212=-1, A121=10, A221=5.
    pub(crate) fn skewed_cubic() -> CubicalTensor {
        let z = CubicalTensor::zeros(3, 2).unwrap();
        let set = [
            ([0, 0, 0], 11.0),
            ([1, 1, 1], 11.0),
            ([0, 0, 1], -1.0),
            ([0, 1, 1], -1.0),
            ([1, 0, 0], -1.0),
            ([1, 0, 1], -1.0),
            ([0, 1, 0], 10.0),
            ([1, 1, 0], 5.0),
        ];
        set.iter().fold(z, |t, (idx, v)| t.with_entry(idx, *v).unwrap())
    }

    #[test]
    fn identity_is_everything() {
        let r = classify(&CubicalTensor::identity(3, 3).unwrap(), &ClassifyOptions::default());
        assert!(r.is_nonsingular_m && r.is_m_tensor && r.is_h_plus && r.is_h_tensor);
        assert_eq!(r.s_certificate, Some(vec![1.0; 3]));
        assert_eq!(r.spectral_radius_of_majorant, Some(0.0));
    }

    #[test]
    fn dominant_z_tensor_is_nonsingular_m() {
        let r = classify(&full_minus_one(), &ClassifyOptions::default());
        assert!(r.is_nonsingular_m);
        assert!(r.is_h_plus);
        assert!(r.is_strictly_diag_dominant);
        assert!(r.s_certificate.is_some());
        assert!((r.spectral_radius_of_majorant.unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(r.comparison_shift, 11.0);
    }

    #[test]
    fn skewed_tensor_accepts_hint() {
        let a = skewed_cubic();
        let hint = [0.1117, 1.0];
        assert_eq!(s_tensor_certificate(&a, Some(&hint), 100), Some(hint.to_vec()));
        let r = classify(&a, &ClassifyOptions::with_hint(hint.to_vec()));
        assert_eq!(r.s_certificate, Some(hint.to_vec()));
        assert!(!r.is_m_tensor);
        assert!(!r.is_diag_dominant);
    }

    #[test]
    fn negative_identity_is_not_certified() {
        let a = CubicalTensor::identity(3, 2).unwrap().scale(-1.0).unwrap();
        assert_eq!(s_tensor_certificate(&a, None, 500), None);
    }

    #[test]
    fn ascent_finds_certificate_when_ones_fails() {
        // row 1 positive only when v1 is large relative to v2
        let a = CubicalTensor::new(2, 2, vec![1.0, -3.0, 0.0, 1.0]).unwrap();
        assert!(!certifies(&[&a], &[1.0, 1.0]));
        let v = s_tensor_certificate(&a, None, 5_000).expect("certificate");
        assert!(certifies(&[&a], &v));
    }

    #[test]
    fn shared_certificate_over_orders() {
        let a3 = full_minus_one();
        let a2 = CubicalTensor::new(2, 2, vec![2.0, -1.0, -1.0, 2.0]).unwrap();
        let v = shared_certificate(&[&a3, &a2], None, 100).unwrap();
        assert!(certifies(&[&a3, &a2], &v));
    }

    #[test]
    fn h_plus_implies_certificate() {
        // H+ but all-ones fails: strong negative coupling balanced by scaling
        let a = CubicalTensor::new(2, 2, vec![1.0, -4.0, -0.1, 1.0]).unwrap();
        let r = classify(&a, &ClassifyOptions::default());
        assert!(r.is_h_plus);
        let v = r.s_certificate.expect("certificate");
        assert!(certifies(&[&a], &v));
    }
}
