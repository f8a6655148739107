//! Fixture distributions, their moments, and truncation oracles.

mod distribution;
mod fixtures;
mod model;
pub mod quadrature;

pub use distribution::{trunc_replace_mean_oracle, truncated_mean_oracle, TestDistribution, QUADRATURE_TOL};
pub use fixtures::{packing_product_instance, random_unit_moment_discrete, two_point_hard_instance};
pub use model::MomentModel;
