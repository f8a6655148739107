use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ball::distance_sq;
use crate::constants::{check_samples, SampleCheck, SampleConstants};
use crate::data::PointSet;
use crate::error::{ensure_positive, Error, Result};
use crate::mechanisms::{gaussian_mechanism, gaussian_sigma, PrivacyBudget, PrivacyLedger};
use crate::moments::MomentModel;
use crate::univariate::UnivariateMean;

/// Below this dimension the ball-truncation pipeline is replaced by
/// coordinate-wise univariate estimation.
pub const DEFAULT_FALLBACK_DIM: f64 = 32.0 * std::f64::consts::LN_2 * 2.0;

/// Truncation radius `4√d/α^{1/(k−1)}`.
pub fn ball_radius(d: usize, alpha: f64, model: &MomentModel) -> f64 {
    4.0 * (d as f64).sqrt() / alpha.powf(model.radius_exponent())
}

/// Pre-noise statistic of the estimator: the sum of `z − center` over
/// points `z` inside the closed ball `B(center, r)`, divided by
/// `ℓ = max(kept, 3n/4)` where `n = points.len()`.
///
/// Changing one point moves it by at most `2r/ℓ ≤ 8r/(3n)` in ℓ₂.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedStatistic {
    pub value: Vec<f64>,
    pub kept: usize,
    pub ell: f64,
}

pub fn truncated_statistic(points: &PointSet, center: &[f64], r: f64) -> Result<TruncatedStatistic> {
    if points.dim() != center.len() {
        return Err(Error::param("center dimension does not match the points"));
    }
    let mut sum = vec![0.0; center.len()];
    let mut kept = 0;
    for z in points.rows() {
        if distance_sq(z, center) <= r * r {
            kept += 1;
            for ((s, x), c) in sum.iter_mut().zip(z).zip(center) {
                *s += x - c;
            }
        }
    }
    let ell = (kept as f64).max(0.75 * points.len() as f64);
    if ell == 0.0 {
        return Err(Error::InsufficientSamples { bound: "truncated statistic", needed: 1, got: 0 });
    }
    sum.iter_mut().for_each(|s| *s /= ell);
    Ok(TruncatedStatistic { value: sum, kept, ell })
}

/// ℓ₂ sensitivity bound `8r/(3n)` of [`truncated_statistic`].
pub fn statistic_sensitivity(r: f64, n: usize) -> f64 {
    8.0 * r / (3.0 * n as f64)
}

/// High-dimensional mean under zCDP or (ε, δ)-DP.
///
/// Input of `2n` points: the first `n` give a coordinate-wise rough center
/// (univariate estimator at accuracy 1, failure 0.1/d per coordinate) using
/// half the budget; the last `n` are truncated to the ball of radius
/// `4√d/α^{1/(k−1)}` around it and averaged with Gaussian noise using the
/// other half. Succeeds with probability 0.7 at the sample bound.
///
/// When `d` is below `fallback_below` the estimator instead runs the
/// univariate estimator on each coordinate with budget split d ways,
/// accuracy `α/√d` and failure `0.3/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighDimMean {
    pub budget: PrivacyBudget,
    pub alpha: f64,
    pub model: MomentModel,
    pub constants: SampleConstants,
    pub check: SampleCheck,
    pub fallback_below: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighDimEstimate {
    pub mean: Vec<f64>,
    /// Rough center (or, in fallback mode, the coordinate-wise estimate).
    pub center: Vec<f64>,
    pub kept: usize,
    pub ell: f64,
    pub noise_sd: f64,
    pub fallback: bool,
    pub ledger: PrivacyLedger,
}

impl HighDimMean {
    pub fn new(budget: PrivacyBudget, alpha: f64, model: MomentModel) -> Result<Self> {
        budget.validate()?;
        model.validate()?;
        ensure_positive("alpha", alpha)?;
        if matches!(budget, PrivacyBudget::Pure { .. }) {
            return Err(Error::UnsupportedFlavor("the Gaussian high-dimensional estimator", "pure"));
        }
        Ok(HighDimMean {
            budget,
            alpha,
            model,
            constants: SampleConstants::default(),
            check: SampleCheck::Enforce,
            fallback_below: DEFAULT_FALLBACK_DIM,
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

    /// Dimensions below `threshold` use the coordinate-wise fallback; 0
    /// forces the truncation pipeline.
    pub fn with_fallback_below(mut self, threshold: f64) -> Self {
        self.fallback_below = threshold;
        self
    }

    pub fn uses_fallback(&self, d: usize) -> bool {
        (d as f64) < self.fallback_below
    }

    fn fallback_coordinate(&self, d: usize) -> Result<UnivariateMean> {
        Ok(UnivariateMean::new(self.budget.split(d)?, self.alpha / (d as f64).sqrt(), 0.3 / d as f64, self.model)?
            .with_constants(self.constants)
            .with_check(SampleCheck::Skip))
    }

    fn centering_coordinate(&self, d: usize) -> Result<UnivariateMean> {
        Ok(UnivariateMean::new(self.budget.split(2 * d)?, 1.0, 0.1 / d as f64, self.model)?
            .with_constants(self.constants)
            .with_check(SampleCheck::Skip))
    }

    /// Budget of the Gaussian step of the pipeline.
    pub fn estimation_budget(&self) -> PrivacyBudget {
        self.budget.scaled(0.5).expect("one half is a valid factor")
    }

    /// Required input length `2n` in dimension `d`.
    pub fn required_samples(&self, d: usize) -> Result<usize> {
        if d == 0 {
            return Err(Error::param("dimension must be positive"));
        }
        if self.uses_fallback(d) {
            return Ok(self.fallback_coordinate(d)?.required_samples());
        }
        let df = d as f64;
        let a = self.alpha;
        let tail = a.powf(self.model.privacy_exponent());
        let inner = df / (a * a)
            + match self.budget {
                PrivacyBudget::Zcdp { rho } => {
                    df / (rho.sqrt() * tail) + (df * self.model.range.ln()).sqrt() * df.ln() / rho.sqrt()
                }
                PrivacyBudget::Approx { epsilon, delta } => {
                    let l = (1.0 / delta).ln();
                    df * l.sqrt() / (epsilon * tail) + (df * l).sqrt() * df.ln() / epsilon
                }
                PrivacyBudget::Pure { .. } => unreachable!("rejected by the constructor"),
            };
        let half = ((self.constants.c3 * inner).ceil() as usize).max(self.centering_coordinate(d)?.required_samples());
        Ok(2 * half)
    }

    pub fn estimate<R: Rng + ?Sized>(&self, data: &PointSet, rng: &mut R) -> Result<HighDimEstimate> {
        let d = data.dim();
        check_samples(self.check, "high-dimensional mean", self.required_samples(d)?, data.len())?;
        if self.uses_fallback(d) {
            return self.estimate_fallback(data, rng);
        }
        let n = data.len() / 2;
        if n == 0 {
            return Err(Error::InsufficientSamples { bound: "high-dimensional mean", needed: 2, got: data.len() });
        }
        let (y, z) = (data.slice(0, n), data.slice(n, 2 * n));
        let mut ledger = PrivacyLedger::new();
        let coord = self.centering_coordinate(d)?;
        let mut center = Vec::with_capacity(d);
        for axis in 0..d {
            let est = coord.estimate(&y.column(axis), rng)?;
            center.push(est.mean);
            ledger.absorb(&format!("center[{axis}]"), est.ledger);
        }

        let r = ball_radius(d, self.alpha, &self.model);
        let stat = truncated_statistic(&z, &center, r)?;
        let sensitivity = statistic_sensitivity(r, n);
        let budget = self.estimation_budget();
        let noisy = gaussian_mechanism(&stat.value, sensitivity, &budget, rng)?;
        ledger.charge("truncated mean", budget);
        Ok(HighDimEstimate {
            mean: noisy.iter().zip(&center).map(|(v, c)| v + c).collect(),
            center,
            kept: stat.kept,
            ell: stat.ell,
            noise_sd: gaussian_sigma(sensitivity, &budget)?,
            fallback: false,
            ledger,
        })
    }

    fn estimate_fallback<R: Rng + ?Sized>(&self, data: &PointSet, rng: &mut R) -> Result<HighDimEstimate> {
        let d = data.dim();
        let coord = self.fallback_coordinate(d)?;
        let mut ledger = PrivacyLedger::new();
        let mut mean = Vec::with_capacity(d);
        for axis in 0..d {
            let est = coord.estimate(&data.column(axis), rng)?;
            mean.push(est.mean);
            ledger.absorb(&format!("coordinate[{axis}]"), est.ledger);
        }
        Ok(HighDimEstimate {
            center: mean.clone(),
            mean,
            kept: data.len(),
            ell: data.len() as f64,
            noise_sd: 0.0,
            fallback: true,
            ledger,
        })
    }
}

/// zCDP high-dimensional mean with default constants.
pub fn zcdp_highd_mean<R: Rng + ?Sized>(
    data: &PointSet,
    rho: f64,
    alpha: f64,
    model: &MomentModel,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(HighDimMean::new(PrivacyBudget::zcdp(rho)?, alpha, *model)?.estimate(data, rng)?.mean)
}

/// (ε, δ)-DP high-dimensional mean with default constants.
pub fn adp_highd_mean<R: Rng + ?Sized>(
    data: &PointSet,
    epsilon: f64,
    delta: f64,
    alpha: f64,
    model: &MomentModel,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(HighDimMean::new(PrivacyBudget::approx(epsilon, delta)?, alpha, *model)?.estimate(data, rng)?.mean)
}
