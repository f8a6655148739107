//! High-dimensional mean estimation under zCDP and approximate DP by
//! coordinate-wise centering, ball truncation and the Gaussian mechanism.

mod ball;
mod estimator;

pub(crate) use ball::distance_sq;
pub use ball::{filter_to_ball, Ball, HighDimTruncationParams};
pub use estimator::{
    adp_highd_mean, ball_radius, statistic_sensitivity, truncated_statistic, zcdp_highd_mean, HighDimEstimate,
    HighDimMean, TruncatedStatistic, DEFAULT_FALLBACK_DIM,
};
