use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{SampleCheck, SampleConstants};
use crate::error::{Error, Result};
use crate::mechanisms::PrivacyBudget;
use crate::moments::{MomentModel, TestDistribution};
use crate::multivariate_pure::PureHighDimMean;
use crate::multivariate_zcdp::HighDimMean;
use crate::univariate::{group_count, UnivariateMean};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorId {
    Univariate,
    HighDim,
    HighDimPure,
}

/// A distribution given inline or as a path to a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionRef {
    File { file: PathBuf },
    Inline(TestDistribution),
}

/// One Monte-Carlo experiment.
///
/// ```json
/// {
///   "estimator": "univariate",
///   "distribution": {"kind": "two-point", "low": 0, "high": 25, "p_high": 0.008},
///   "model": {"k": 2, "range": 10},
///   "budget": {"flavor": "pure", "epsilon": 1},
///   "alpha": 0.2, "beta": 0.1, "trials": 200, "seed": 7
/// }
/// ```
/// `n` defaults to the estimator's implemented sample bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub estimator: EstimatorId,
    pub distribution: DistributionRef,
    pub model: MomentModel,
    pub budget: PrivacyBudget,
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub constants: SampleConstants,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_below: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_cap: Option<usize>,
}

fn default_beta() -> f64 {
    0.1
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

/// A configured estimator ready to run on sampled data.
#[derive(Debug, Clone, Copy)]
pub enum Estimator {
    Univariate(UnivariateMean),
    HighDim(HighDimMean),
    HighDimPure(PureHighDimMean),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(config_err)
    }

    /// Reads a config file; relative distribution paths resolve against
    /// the config's directory and are inlined.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::from_json(&text)?;
        if let DistributionRef::File { file } = &config.distribution {
            let resolved = match path.parent() {
                Some(dir) if file.is_relative() => dir.join(file),
                _ => file.clone(),
            };
            config.distribution = DistributionRef::Inline(load_distribution(&resolved)?);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn distribution(&self) -> Result<TestDistribution> {
        match &self.distribution {
            DistributionRef::Inline(d) => Ok(d.clone()),
            DistributionRef::File { file } => load_distribution(file),
        }
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.distribution()?.dim())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trial count must be at least 1".into()));
        }
        let dist = self.distribution()?;
        dist.validate().map_err(config_err)?;
        self.constants.validate().map_err(config_err)?;
        match self.estimator {
            EstimatorId::Univariate if !dist.is_univariate() => {
                return Err(Error::Config(format!(
                    "the univariate estimator needs a univariate distribution, got dimension {}",
                    dist.dim()
                )))
            }
            EstimatorId::HighDimPure if !matches!(self.budget, PrivacyBudget::Pure { .. }) => {
                return Err(Error::Config("the pure high-dimensional estimator needs a pure budget".into()))
            }
            _ => {}
        }
        self.estimator_impl().map(|_| ())
    }

    pub fn estimator_impl(&self) -> Result<Estimator> {
        let wrap = |e: Error| Error::Config(e.to_string());
        Ok(match self.estimator {
            EstimatorId::Univariate => Estimator::Univariate(
                UnivariateMean::new(self.budget, self.alpha, self.beta, self.model)
                    .map_err(wrap)?
                    .with_constants(self.constants),
            ),
            EstimatorId::HighDim => {
                let mut e =
                    HighDimMean::new(self.budget, self.alpha, self.model).map_err(wrap)?.with_constants(self.constants);
                if let Some(t) = self.fallback_below {
                    e = e.with_fallback_below(t);
                }
                Estimator::HighDim(e)
            }
            EstimatorId::HighDimPure => {
                let eps = self.budget.epsilon().ok_or_else(|| Error::Config("pure budget required".into()))?;
                let mut e = PureHighDimMean::new(eps, self.alpha, self.beta, self.model)
                    .map_err(wrap)?
                    .with_constants(self.constants);
                if let Some(cap) = self.grid_cap {
                    e = e.with_grid_cap(cap);
                }
                Estimator::HighDimPure(e)
            }
        })
    }

    /// Sample size used when `n` is not given: the implemented bound.
    pub fn implemented_n(&self) -> Result<usize> {
        let d = self.dim()?;
        match self.estimator_impl()? {
            Estimator::Univariate(e) => Ok(e.required_samples()),
            Estimator::HighDim(e) => e.required_samples(d),
            Estimator::HighDimPure(e) => e.required_samples(d),
        }
    }

    pub fn sample_size(&self) -> Result<usize> {
        match self.n {
            Some(n) => Ok(n),
            None => self.implemented_n(),
        }
    }

    /// Success probability the estimator promises at its bound.
    pub fn target_probability(&self) -> f64 {
        match self.estimator {
            EstimatorId::HighDim => 0.7,
            EstimatorId::Univariate | EstimatorId::HighDimPure => 1.0 - self.beta,
        }
    }

    /// Error radius counted as a success.
    pub fn success_radius(&self) -> f64 {
        match self.estimator {
            EstimatorId::HighDimPure => crate::multivariate_pure::TIE_RADIUS * self.alpha,
            _ => self.alpha,
        }
    }

    /// Smallest input that every estimator stage can run on.
    pub fn minimum_n(&self) -> Result<usize> {
        let d = self.dim()?;
        Ok(match self.estimator {
            EstimatorId::Univariate => 2 * group_count(self.beta),
            EstimatorId::HighDim => 4 * group_count(0.1 / d as f64),
            EstimatorId::HighDimPure => {
                4 * group_count(self.beta / (2.0 * d as f64)).max(crate::multivariate_pure::match_groups(d, self.beta))
            }
        })
    }
}

impl Estimator {
    /// Draws `n` samples from `dist`, estimates, and returns the ℓ₂ error.
    pub fn error_on<R: Rng + ?Sized>(
        &self,
        dist: &TestDistribution,
        n: usize,
        check: SampleCheck,
        rng: &mut R,
    ) -> Result<f64> {
        let mu = dist.mean_vector()?;
        let estimate = match *self {
            Estimator::Univariate(e) => vec![e.with_check(check).estimate(&dist.sample(n, rng)?, rng)?.mean],
            Estimator::HighDim(e) => e.with_check(check).estimate(&dist.sample_points(n, rng)?, rng)?.mean,
            Estimator::HighDimPure(e) => e.with_check(check).estimate(&dist.sample_points(n, rng)?, rng)?.mean,
        };
        Ok(estimate.iter().zip(&mu).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
    }
}

pub fn load_distribution(path: &Path) -> Result<TestDistribution> {
    let text = std::fs::read_to_string(path)?;
    let dist: TestDistribution =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    dist.validate().map_err(config_err)?;
    Ok(dist)
}

pub fn save_distribution(dist: &TestDistribution, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(dist).expect("distribution serializes"))?;
    Ok(())
}
