//! One-dimensional estimators: private range estimation and the truncated
//! noisy median-of-means mean.

mod interval;
mod mean;
mod range;

pub use interval::{clamp, clamped_mean, Interval, TruncationParams};
pub use mean::{group_count, median_of_means, univariate_mean, UnivariateEstimate, UnivariateMean};
pub use range::{bucket_radius, pdp_range_estimate, range_estimate, RangeEstimator, RangeResult};
