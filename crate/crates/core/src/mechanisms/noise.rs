//! Laplace and Gaussian noise addition.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::PrivacyBudget;
use crate::error::{ensure_positive, Error, Result};

/// One draw from Lap(scale): an exponential magnitude with a random sign.
pub fn sample_laplace<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    let magnitude: f64 = Exp1.sample(rng);
    if rng.random::<bool>() {
        scale * magnitude
    } else {
        -scale * magnitude
    }
}

/// One draw from N(0, sd²).
pub fn sample_gaussian<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sd * z
}

/// Releases `value + Lap(l1_sensitivity / epsilon)`.
pub fn laplace_mechanism<R: Rng + ?Sized>(value: f64, l1_sensitivity: f64, epsilon: f64, rng: &mut R) -> Result<f64> {
    ensure_positive("l1 sensitivity", l1_sensitivity)?;
    ensure_positive("epsilon", epsilon)?;
    Ok(value + sample_laplace(l1_sensitivity / epsilon, rng))
}

/// Per-coordinate standard deviation of the Gaussian mechanism:
/// `Δ/√(2ρ)` under zCDP and `Δ√(2 ln(2/δ))/ε` under (ε, δ)-DP.
pub fn gaussian_sigma(l2_sensitivity: f64, budget: &PrivacyBudget) -> Result<f64> {
    if !(l2_sensitivity.is_finite() && l2_sensitivity >= 0.0) {
        return Err(Error::param(format!("l2 sensitivity must be finite and non-negative, got {l2_sensitivity}")));
    }
    budget.validate()?;
    match *budget {
        PrivacyBudget::Zcdp { rho } => Ok(l2_sensitivity / (2.0 * rho).sqrt()),
        PrivacyBudget::Approx { epsilon, delta } => Ok(l2_sensitivity * (2.0 * (2.0 / delta).ln()).sqrt() / epsilon),
        PrivacyBudget::Pure { .. } => Err(Error::UnsupportedFlavor("the Gaussian mechanism", "pure")),
    }
}

/// Adds i.i.d. Gaussian noise calibrated to `l2_sensitivity` and `budget`
/// to every coordinate.
pub fn gaussian_mechanism<R: Rng + ?Sized>(
    vector: &[f64],
    l2_sensitivity: f64,
    budget: &PrivacyBudget,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let sd = gaussian_sigma(l2_sensitivity, budget)?;
    if sd == 0.0 {
        return Ok(vector.to_vec());
    }
    Ok(vector.iter().map(|v| v + sample_gaussian(sd, rng)).collect())
}
