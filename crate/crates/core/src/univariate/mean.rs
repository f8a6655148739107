use rand::Rng;
use serde::{Deserialize, Serialize};

use super::range::{RangeEstimator, RangeResult};
use crate::constants::{check_samples, SampleCheck, SampleConstants};
use crate::data::ceil_odd;
use crate::error::{ensure_open_unit, ensure_positive, Error, Result};
use crate::mechanisms::{gaussian_sigma, sample_gaussian, sample_laplace, PrivacyBudget, PrivacyLedger};
use crate::moments::MomentModel;

/// Exact middle order statistic of an odd-length list.
pub fn median_of_means(estimates: &[f64]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::param("median of an empty list"));
    }
    if estimates.len().is_multiple_of(2) {
        return Err(Error::param(format!("median needs an odd number of estimates, got {}", estimates.len())));
    }
    let mut v = estimates.to_vec();
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    Ok(*m)
}

/// Group count `⌈200 ln(2/β)⌉`, rounded up to odd.
pub fn group_count(beta: f64) -> usize {
    ceil_odd(200.0 * (2.0 / beta).ln())
}

/// Truncated noisy median-of-means estimator for one-dimensional data.
///
/// Input of length `2n` is split into halves `Z` and `W`, each cut into `m`
/// groups of `⌊n/m⌋` (leftover samples are discarded). Group `i` estimates a
/// range `Iᵢ` from `Zⁱ`, clamps `Wⁱ` to it and releases its mean with noise
/// calibrated to `|Iᵢ|/groupsize`; the output is the median of the noisy
/// group means. Each group spends half its budget on the range and half on
/// the mean; groups are disjoint, so the total is the declared budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateMean {
    pub budget: PrivacyBudget,
    pub alpha: f64,
    pub beta: f64,
    pub model: MomentModel,
    pub constants: SampleConstants,
    pub check: SampleCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivariateEstimate {
    pub mean: f64,
    /// Noisy per-group means.
    pub group_means: Vec<f64>,
    pub ranges: Vec<RangeResult>,
    pub group_size: usize,
    pub discarded: usize,
    pub ledger: PrivacyLedger,
}

impl UnivariateMean {
    pub fn new(budget: PrivacyBudget, alpha: f64, beta: f64, model: MomentModel) -> Result<Self> {
        budget.validate()?;
        model.validate()?;
        ensure_positive("alpha", alpha)?;
        ensure_open_unit("beta", beta)?;
        Ok(UnivariateMean {
            budget,
            alpha,
            beta,
            model,
            constants: SampleConstants::default(),
            check: SampleCheck::Enforce,
        })
    }

    pub fn with_constants(mut self, constants: SampleConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_check(mut self, check: SampleCheck) -> Self {
        self.check = check;
        self
    }

    pub fn groups(&self) -> usize {
        group_count(self.beta)
    }

    /// Budgets of the range step and the noise step within one group.
    pub fn step_budgets(&self) -> (PrivacyBudget, PrivacyBudget) {
        match self.budget {
            PrivacyBudget::Pure { epsilon } => {
                let half = PrivacyBudget::Pure { epsilon: epsilon / 2.0 };
                (half, half)
            }
            // Stability histogram carries all of δ; the Laplace step is pure.
            PrivacyBudget::Approx { epsilon, delta } => (
                PrivacyBudget::Approx { epsilon: epsilon / 2.0, delta },
                PrivacyBudget::Pure { epsilon: epsilon / 2.0 },
            ),
            PrivacyBudget::Zcdp { rho } => {
                let half = PrivacyBudget::Zcdp { rho: rho / 2.0 };
                (half, half)
            }
        }
    }

    /// Required `n` (half the input length).
    pub fn required_half(&self) -> usize {
        let l = (1.0 / self.beta).ln();
        let a = self.alpha;
        let tail = a.powf(self.model.privacy_exponent());
        let ln_r = self.model.range.ln();
        let inner = l / (a * a)
            + match self.budget {
                PrivacyBudget::Pure { epsilon } => l / (epsilon * tail) + ln_r * l / epsilon,
                PrivacyBudget::Approx { epsilon, delta } => l / (epsilon * tail) + (1.0 / delta).ln() * l / epsilon,
                PrivacyBudget::Zcdp { rho } => l / (rho.sqrt() * tail) + ln_r.sqrt() * l / rho.sqrt(),
            };
        (self.constants.c2 * inner).ceil() as usize
    }

    /// Required input length `2n`.
    pub fn required_samples(&self) -> usize {
        2 * self.required_half()
    }

    pub fn estimate<R: Rng + ?Sized>(&self, data: &[f64], rng: &mut R) -> Result<UnivariateEstimate> {
        check_samples(self.check, "univariate mean", self.required_samples(), data.len())?;
        let m = self.groups();
        let n = data.len() / 2;
        let g = n / m;
        if g == 0 {
            return Err(Error::InsufficientSamples { bound: "one sample per group", needed: 2 * m, got: data.len() });
        }
        let (z, w) = data.split_at(n);
        let (range_budget, noise_budget) = self.step_budgets();
        let range = RangeEstimator::new(range_budget, self.alpha.min(1.0), self.model)?
            .with_c1(self.constants.c1)
            .with_check(SampleCheck::Skip);
        let spec = range.spec()?;

        let mut group_means = Vec::with_capacity(m);
        let mut ranges = Vec::with_capacity(m);
        for i in 0..m {
            let res = range.estimate_with_spec(&z[i * g..(i + 1) * g], &spec, rng)?;
            let iv = res.interval;
            let sum: f64 = w[i * g..(i + 1) * g].iter().map(|&x| iv.clamp(x)).sum();
            let sensitivity = iv.len() / g as f64;
            let noise = match noise_budget {
                PrivacyBudget::Pure { epsilon } | PrivacyBudget::Approx { epsilon, .. } => {
                    sample_laplace(sensitivity / epsilon, rng)
                }
                PrivacyBudget::Zcdp { .. } => sample_gaussian(gaussian_sigma(sensitivity, &noise_budget)?, rng),
            };
            group_means.push(sum / g as f64 + noise);
            ranges.push(res);
        }

        let mut ledger = PrivacyLedger::new();
        ledger.charge_parallel("range", &vec![range_budget; m])?;
        ledger.charge_parallel("noisy group mean", &vec![noise_budget; m])?;
        Ok(UnivariateEstimate {
            mean: median_of_means(&group_means)?,
            group_means,
            ranges,
            group_size: g,
            discarded: data.len() - 2 * m * g,
            ledger,
        })
    }
}

/// Univariate mean with default constants and the sample-size check on.
pub fn univariate_mean<R: Rng + ?Sized>(
    data: &[f64],
    budget: &PrivacyBudget,
    alpha: f64,
    beta: f64,
    model: &MomentModel,
    rng: &mut R,
) -> Result<f64> {
    Ok(UnivariateMean::new(*budget, alpha, beta, *model)?.estimate(data, rng)?.mean)
}
