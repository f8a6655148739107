use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::config::ExperimentConfig;
use crate::constants::SampleCheck;
use crate::error::Result;
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub n: usize,
    /// ℓ₂ distance between estimate and true mean.
    pub error: f64,
    pub success: bool,
    pub wall_time_ms: f64,
}

/// Runs `config.trials` independent trials; trial `i` draws everything from
/// stream `i` of the master seed, so results do not depend on scheduling.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let (n, check) = match config.n {
        Some(n) => (n, SampleCheck::Skip),
        None => (config.implemented_n()?, SampleCheck::Enforce),
    };
    run_trial_range(config, n, check, 0..config.trials as u64)
}

pub(crate) fn run_trial_range(
    config: &ExperimentConfig,
    n: usize,
    check: SampleCheck,
    trials: std::ops::Range<u64>,
) -> Result<Vec<TrialRecord>> {
    let estimator = config.estimator_impl()?;
    let dist = config.distribution()?;
    let radius = config.success_radius();
    trials
        .into_par_iter()
        .map(|trial| {
            let start = Instant::now();
            let mut rng = stream(config.seed, trial);
            let error = estimator.error_on(&dist, n, check, &mut rng)?;
            Ok(TrialRecord {
                trial,
                n,
                error,
                success: error <= radius,
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}

/// Success count with a two-sided 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessSummary {
    pub successes: usize,
    pub trials: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SuccessSummary {
    pub fn new(successes: usize, trials: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, 1.959963984540054);
        let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        SuccessSummary { successes, trials, rate, ci_low, ci_high }
    }

    pub fn from_records(records: &[TrialRecord]) -> Self {
        Self::new(records.iter().filter(|r| r.success).count(), records.len())
    }

    /// True unless the interval lies entirely below `probability`.
    pub fn consistent_with(&self, probability: f64) -> bool {
        self.ci_high >= probability
    }
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Normal quantile for a two-sided level split across `comparisons` tests.
pub fn bonferroni_z(level: f64, comparisons: usize) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(1.0 - level / (2.0 * comparisons.max(1) as f64))
}
