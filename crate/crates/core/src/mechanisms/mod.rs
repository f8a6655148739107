//! Differential privacy building blocks: budgets, noise addition, private
//! histograms and the exponential mechanism.

mod budget;
mod exponential;
mod histogram;
mod noise;

pub use budget::{Charge, PrivacyBudget, PrivacyLedger};
pub use exponential::{exponential_mechanism, utility_gap};
pub use histogram::{private_histogram, stability_threshold, HistogramSpec, NoisyCounts};
pub use noise::{gaussian_mechanism, gaussian_sigma, laplace_mechanism, sample_gaussian, sample_laplace};
