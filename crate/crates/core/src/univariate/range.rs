use rand::Rng;
use serde::{Deserialize, Serialize};

use super::interval::Interval;
use crate::constants::{check_samples, SampleCheck, SampleConstants};
use crate::error::{Error, Result};
use crate::mechanisms::{private_histogram, HistogramSpec, PrivacyBudget};
use crate::moments::MomentModel;

/// Output of private range estimation: `interval` is the selected bucket of
/// width `2r` widened by `2r` on each side, so its length is `6r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeResult {
    pub interval: Interval,
    pub r: f64,
}

/// Half bucket width `10/α^{1/(k−1)}`.
pub fn bucket_radius(alpha: f64, model: &MomentModel) -> f64 {
    10.0 / alpha.powf(model.radius_exponent())
}

/// Private range estimation: histogram with buckets of width `2r`, pick the
/// heaviest noisy bucket, pad by `2r` on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeEstimator {
    pub budget: PrivacyBudget,
    pub alpha: f64,
    pub model: MomentModel,
    pub c1: f64,
    pub check: SampleCheck,
}

impl RangeEstimator {
    pub fn new(budget: PrivacyBudget, alpha: f64, model: MomentModel) -> Result<Self> {
        budget.validate()?;
        model.validate()?;
        // The analysis wants α < 1/16; larger values only shrink r and are
        // needed for coarse centering at accuracy 1, so (0, 1] is accepted.
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(RangeEstimator { budget, alpha, model, c1: SampleConstants::default().c1, check: SampleCheck::Enforce })
    }

    pub fn with_c1(mut self, c1: f64) -> Self {
        self.c1 = c1;
        self
    }

    pub fn with_check(mut self, check: SampleCheck) -> Self {
        self.check = check;
        self
    }

    pub fn r(&self) -> f64 {
        bucket_radius(self.alpha, &self.model)
    }

    pub fn spec(&self) -> Result<HistogramSpec> {
        HistogramSpec::for_range(self.model.range, self.r())
    }

    /// Samples needed by the bound for this flavor.
    pub fn required_samples(&self) -> usize {
        let log_term = (self.model.range * self.alpha).ln().max(1.0);
        let privacy = match self.budget {
            PrivacyBudget::Pure { epsilon } => log_term / epsilon,
            PrivacyBudget::Approx { epsilon, delta } => (1.0 / delta).ln() / epsilon,
            PrivacyBudget::Zcdp { rho } => (log_term / rho).sqrt(),
        };
        (self.c1 * (1.0 / self.alpha + privacy)).ceil() as usize
    }

    pub fn estimate<R: Rng + ?Sized>(&self, data: &[f64], rng: &mut R) -> Result<RangeResult> {
        check_samples(self.check, "range estimation", self.required_samples(), data.len())?;
        self.estimate_with_spec(data, &self.spec()?, rng)
    }

    /// Same as [`estimate`](Self::estimate) with a prebuilt bucket layout and
    /// no sample-size check.
    pub(crate) fn estimate_with_spec<R: Rng + ?Sized>(
        &self,
        data: &[f64],
        spec: &HistogramSpec,
        rng: &mut R,
    ) -> Result<RangeResult> {
        let r = self.r();
        let noisy = private_histogram(data, spec, &self.budget, rng)?;
        let (lo, hi) = spec.bucket(noisy.argmax());
        Ok(RangeResult { interval: Interval { lo: lo - 2.0 * r, hi: hi + 2.0 * r }, r })
    }
}

/// Pure-DP range estimation with the default constant and sample check.
pub fn pdp_range_estimate<R: Rng + ?Sized>(
    data: &[f64],
    epsilon: f64,
    alpha: f64,
    model: &MomentModel,
    rng: &mut R,
) -> Result<RangeResult> {
    range_estimate(data, &PrivacyBudget::pure(epsilon)?, alpha, model, rng)
}

/// Range estimation under any budget flavor.
pub fn range_estimate<R: Rng + ?Sized>(
    data: &[f64],
    budget: &PrivacyBudget,
    alpha: f64,
    model: &MomentModel,
    rng: &mut R,
) -> Result<RangeResult> {
    RangeEstimator::new(*budget, alpha, *model)?.estimate(data, rng)
}
