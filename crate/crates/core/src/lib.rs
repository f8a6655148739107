//! Differentially private mean estimation for heavy-tailed distributions.
//!
// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod data;
pub mod error;
pub mod harness;
pub mod mechanisms;
pub mod moments;
pub mod multivariate_pure;
pub mod multivariate_zcdp;
pub mod rng;
pub mod univariate;

pub use constants::{SampleCheck, SampleConstants};
pub use error::{Error, Result};
