use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::param(format!("[{lo}, {hi}] is not a nonempty finite interval")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Nearest point of the interval.
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

pub fn clamp(x: f64, interval: &Interval) -> f64 {
    interval.clamp(x)
}

/// Mean of `values` after clamping each to `interval`.
pub fn clamped_mean(values: &[f64], interval: &Interval) -> f64 {
    let sum: f64 = values.iter().map(|&x| interval.clamp(x)).sum();
    sum / values.len() as f64
}

/// Parameters of a symmetric clamp around `center`: radius
/// `ξ = C/τ^{1/(k−1)}` keeps the bias of the clamped mean below `τ`
/// whenever `|μ − center| ≤ ξ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    pub center: f64,
    pub radius: f64,
    pub constant: f64,
    pub tau: f64,
}

impl TruncationParams {
    pub fn new(center: f64, constant: f64, tau: f64, k: f64) -> Result<Self> {
        if !(constant >= 6.0) {
            return Err(Error::param(format!("truncation constant must be at least 6, got {constant}")));
        }
        if !(tau > 0.0 && tau < 1.0 / 16.0) {
            return Err(Error::param(format!("target bias must lie in (0, 1/16), got {tau}")));
        }
        if !(k >= 2.0) {
            return Err(Error::param(format!("k must be >= 2, got {k}")));
        }
        Ok(TruncationParams { center, radius: constant / tau.powf(1.0 / (k - 1.0)), constant, tau })
    }

    pub fn interval(&self) -> Interval {
        Interval { lo: self.center - self.radius, hi: self.center + self.radius }
    }
}
