use serde::{Deserialize, Serialize};

use super::{CubicalTensor, TensorError};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000 }
    }
}

/// Perron value of a nonnegative tensor with its Collatz bracket.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub rho: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    /// True when the ε-shift extrapolation was used.
    pub reducible: bool,
    /// Positive vector (sum 1) at which the bracket was evaluated.
    pub vector: Vec<f64>,
    /// Collatz bracket after every iteration of the final power run.
    pub bracket_history: Vec<(f64, f64)>,
}

/// Spectral radius of a nonnegative tensor by the shifted power iteration
/// `x <- ((B + I) x^{m-1})^{[1/(m-1)]}`, normalised to unit sum.
///
/// The bracket `min_i (B x^{m-1})_i / x_i^{m-1} <= rho(B) <= max_i (...)`
/// holds at every positive `x`; the run stops once it is narrower than
/// `tol * max(1, upper)`. Reducible tensors are perturbed by
/// `eps * ones` with `eps = 1e-9 * max entry`, solved at `eps` and `eps/10`,
/// and Richardson-extrapolated to `eps -> 0`.
pub fn spectral_radius_nonneg(b: &CubicalTensor, opts: SpectralOptions) -> Result<SpectralEstimate, TensorError> {
    if let Some((index, &value)) = b.entries().iter().enumerate().find(|(_, &v)| v < 0.0) {
        return Err(TensorError::NegativeEntry { index, value });
    }
    let max_entry = b.entries().iter().cloned().fold(0.0, f64::max);
    let n = b.dim();
    if max_entry == 0.0 {
        return Ok(SpectralEstimate {
            rho: 0.0,
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
            reducible: n > 1,
            vector: vec![1.0 / n as f64; n],
            bracket_history: vec![(0.0, 0.0)],
        });
    }
    if b.is_irreducible() {
        return power_run(b, opts);
    }

    let eps = 1e-9 * max_entry;
    let coarse = power_run(&b.map(|v| v + eps)?, opts)?;
    let fine = power_run(&b.map(|v| v + eps / 10.0)?, opts)?;
    let extrapolated = fine.rho + (fine.rho - coarse.rho) / 9.0;
    let (lower, upper) = collatz(b, &fine.vector);
    // rho(B) <= rho(B + eps J) <= the perturbed upper bound
    let upper = upper.min(fine.upper);
    Ok(SpectralEstimate {
        rho: extrapolated.clamp(lower, upper),
        lower,
        upper,
        iterations: coarse.iterations + fine.iterations,
        reducible: true,
        vector: fine.vector,
        bracket_history: fine.bracket_history,
    })
}

fn collatz(b: &CubicalTensor, x: &[f64]) -> (f64, f64) {
    let y = b.tvp(x).expect("dimension checked");
    let p = (b.order() - 1) as i32;
    y.iter().zip(x).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&yi, &xi)| {
        let r = yi / xi.powi(p);
        (lo.min(r), hi.max(r))
    })
}

fn power_run(b: &CubicalTensor, opts: SpectralOptions) -> Result<SpectralEstimate, TensorError> {
    let n = b.dim();
    let p = (b.order() - 1) as f64;
    let mut x = vec![1.0 / n as f64; n];
    let mut history = Vec::new();
    let (mut lower, mut upper) = collatz(b, &x);
    history.push((lower, upper));
    for it in 1..=opts.max_iter {
        if upper - lower < opts.tol * upper.max(1.0) {
            return Ok(SpectralEstimate {
                rho: 0.5 * (lower + upper),
                lower,
                upper,
                iterations: it - 1,
                reducible: false,
                vector: x,
                bracket_history: history,
            });
        }
        let y = b.tvp(&x)?;
        let mut next: Vec<f64> = y
            .iter()
            .zip(&x)
            .map(|(&yi, &xi)| (yi + xi.powf(p)).powf(1.0 / p))
            .collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        if next.iter().any(|&v| !(v > 0.0)) {
            break;
        }
        x = next;
        let (lo, hi) = collatz(b, &x);
        // both bounds are valid at every positive x; keep the tightest seen
        lower = lower.max(lo);
        upper = upper.min(hi);
        history.push((lower, upper));
    }
    if upper - lower < opts.tol * upper.max(1.0) {
        return Ok(SpectralEstimate {
            rho: 0.5 * (lower + upper),
            lower,
            upper,
            iterations: opts.max_iter,
            reducible: false,
            vector: x,
            bracket_history: history,
        });
    }
    Err(TensorError::NoConvergence { lower, upper, iterations: opts.max_iter })
}
