use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution class: k-th central moment at most `moment_bound` in every
/// unit direction and mean norm at most `range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentModel {
    pub k: f64,
    #[serde(default = "unit")]
    pub moment_bound: f64,
    pub range: f64,
}

fn unit() -> f64 {
    1.0
}

impl MomentModel {
    pub fn new(k: f64, moment_bound: f64, range: f64) -> Result<Self> {
        let m = MomentModel { k, moment_bound, range };
        m.validate()?;
        Ok(m)
    }

    /// Unit moment bound.
    pub fn unit(k: f64, range: f64) -> Result<Self> {
        Self::new(k, 1.0, range)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k >= 2.0) || !self.k.is_finite() {
            return Err(Error::param(format!("k must be a finite real >= 2, got {}", self.k)));
        }
        if !(self.moment_bound > 0.0) || !self.moment_bound.is_finite() {
            return Err(Error::param(format!("moment bound must be positive, got {}", self.moment_bound)));
        }
        if !(self.range > 1.0) || !self.range.is_finite() {
            return Err(Error::param(format!("range bound must exceed 1, got {}", self.range)));
        }
        Ok(())
    }

    /// `1/(k−1)`, the exponent that turns an accuracy target into a
    /// truncation radius.
    pub fn radius_exponent(&self) -> f64 {
        1.0 / (self.k - 1.0)
    }

    /// `k/(k−1)`, the exponent of `1/α` in the privacy cost.
    pub fn privacy_exponent(&self) -> f64 {
        self.k / (self.k - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(MomentModel::new(2.0, 1.0, 10.0).is_ok());
        assert!(MomentModel::new(1.5, 1.0, 10.0).is_err());
        assert!(MomentModel::new(2.0, 0.0, 10.0).is_err());
        assert!(MomentModel::new(2.0, 1.0, 1.0).is_err());
        assert!(MomentModel::new(f64::NAN, 1.0, 10.0).is_err());
    }

    #[test]
    fn exponents() {
        let m = MomentModel::unit(4.0, 10.0).unwrap();
        assert!((m.privacy_exponent() - 4.0 / 3.0).abs() < 1e-15);
        assert!((m.radius_exponent() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn moment_bound_defaults_to_one() {
        let m: MomentModel = serde_json::from_str(r#"{"k": 2, "range": 10}"#).unwrap();
        assert_eq!(m.moment_bound, 1.0);
    }
}
