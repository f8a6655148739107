//! The exponential mechanism, sampled by Gumbel-max perturbation.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{ensure_positive, Error, Result};

/// Standard Gumbel draw, `−ln E` for `E ~ Exp(1)`.
fn sample_gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    -e.ln()
}

/// Selects an index with probability proportional to
/// `exp(ε · score / (2Δ))`.
///
/// Each log-weight is perturbed by an independent Gumbel variable and the
/// argmax is returned, which never exponentiates a score.
pub fn exponential_mechanism<R: Rng + ?Sized>(
    scores: &[f64],
    sensitivity: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<usize> {
    if scores.is_empty() {
        return Err(Error::param("the exponential mechanism needs at least one candidate"));
    }
    ensure_positive("score sensitivity", sensitivity)?;
    ensure_positive("epsilon", epsilon)?;
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::param(format!("scores must be finite, got {bad}")));
    }
    let temperature = epsilon / (2.0 * sensitivity);
    let mut best = 0;
    let mut best_key = f64::NEG_INFINITY;
    for (i, &s) in scores.iter().enumerate() {
        let key = temperature * s + sample_gumbel(rng);
        if key > best_key {
            best_key = key;
            best = i;
        }
    }
    Ok(best)
}

/// Utility gap `(2Δ/ε)(ln|S| + ln(1/β))` that the selected score falls
/// below the optimum with probability at most β.
pub fn utility_gap(candidates: usize, sensitivity: f64, epsilon: f64, beta: f64) -> f64 {
    2.0 * sensitivity / epsilon * ((candidates as f64).ln() + (1.0 / beta).ln())
}
