use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};

/// Multiplicative constants of the implemented sample-size bounds.
///
/// * `c1`: range estimation;
/// * `c2`: univariate mean;
/// * `c3`: high-dimensional zCDP / approximate-DP mean;
/// * `c4`: high-dimensional pure-DP mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Default for SampleConstants {
    fn default() -> Self {
        SampleConstants { c1: 24.0, c2: 2000.0, c3: 64.0, c4: 64.0 }
    }
}

impl SampleConstants {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("c1", self.c1)?;
        ensure_positive("c2", self.c2)?;
        ensure_positive("c3", self.c3)?;
        ensure_positive("c4", self.c4)
    }
}

/// Whether an estimator refuses inputs smaller than its sample bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleCheck {
    #[default]
    Enforce,
    /// Run on whatever data is given; used by sample-complexity searches.
    Skip,
}

pub(crate) fn check_samples(check: SampleCheck, bound: &'static str, needed: usize, got: usize) -> Result<()> {
    if check == SampleCheck::Enforce && got < needed {
        return Err(crate::Error::InsufficientSamples { bound, needed, got });
    }
    Ok(())
}
