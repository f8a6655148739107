use serde::{Deserialize, Serialize};

use crate::data::PointSet;
use crate::error::{ensure_positive, Error, Result};

/// Closed ℓ₂ ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        ensure_positive("ball radius", radius)?;
        if center.is_empty() {
            return Err(Error::param("ball center must have at least one coordinate"));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        distance_sq(x, &self.center) <= self.radius * self.radius
    }
}

pub(crate) fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Points of `points` inside the closed ball, in their original order.
pub fn filter_to_ball(points: &PointSet, ball: &Ball) -> Result<PointSet> {
    if points.dim() != ball.dim() {
        return Err(Error::param(format!("points have dimension {}, ball has {}", points.dim(), ball.dim())));
    }
    let mut kept = PointSet::empty(points.dim());
    for row in points.rows().filter(|row| ball.contains(row)) {
        kept.push(row);
    }
    Ok(kept)
}

/// Ball truncation parameters: radius `ξ = C√d/τ^{1/(k−1)}` around
/// `center`, which bounds the bias of replacing outside points by the mean
/// by `τ` when the center is within `ξ/2` of the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct HighDimTruncationParams {
    pub center: Vec<f64>,
    pub xi: f64,
    pub constant: f64,
    pub tau: f64,
}

impl HighDimTruncationParams {
    pub fn new(center: Vec<f64>, constant: f64, tau: f64, k: f64) -> Result<Self> {
        if !(constant > 2.0) {
            return Err(Error::param(format!("truncation constant must exceed 2, got {constant}")));
        }
        if !(tau > 0.0 && tau < 1.0 / 16.0) {
            return Err(Error::param(format!("target bias must lie in (0, 1/16), got {tau}")));
        }
        if !(k >= 2.0) {
            return Err(Error::param(format!("k must be >= 2, got {k}")));
        }
        let d = center.len() as f64;
        Ok(HighDimTruncationParams { xi: constant * d.sqrt() / tau.powf(1.0 / (k - 1.0)), center, constant, tau })
    }

    pub fn ball(&self) -> Ball {
        Ball { center: self.center.clone(), radius: self.xi }
    }
}
