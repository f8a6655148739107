//! Private histograms over a fixed finite bucketization.

use rand::Rng;

use super::noise::{sample_gaussian, sample_laplace};
use super::PrivacyBudget;
use crate::error::{ensure_positive, Error, Result};

/// Contiguous buckets `[b₀, b₁), [b₁, b₂), …, [b_{B−1}, b_B]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramSpec {
    boundaries: Vec<f64>,
}

impl HistogramSpec {
    pub fn new(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::param("a histogram needs at least one bucket"));
        }
        if boundaries.iter().any(|b| !b.is_finite()) || boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("bucket boundaries must be finite and strictly increasing"));
        }
        Ok(HistogramSpec { boundaries })
    }

    /// Buckets of width `2r` aligned at zero that cover `[−R−2r, R+2r]`.
    pub fn for_range(range: f64, r: f64) -> Result<Self> {
        ensure_positive("range bound", range)?;
        ensure_positive("bucket half-width", r)?;
        let width = 2.0 * r;
        let reach = ((range + width) / width).ceil() as i64;
        HistogramSpec::new((-reach..=reach).map(|j| j as f64 * width).collect())
    }

    pub fn bucket_count(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// `[lo, hi]` of bucket `i`.
    pub fn bucket(&self, i: usize) -> (f64, f64) {
        (self.boundaries[i], self.boundaries[i + 1])
    }

    /// Bucket holding `x`; values outside the covered span go to the nearest
    /// end bucket.
    pub fn bucket_of(&self, x: f64) -> usize {
        // Number of interior boundaries at or below x.
        let interior = &self.boundaries[1..self.boundaries.len() - 1];
        interior.partition_point(|&b| b <= x)
    }

    /// Exact (pre-noise) counts.
    pub fn counts(&self, data: &[f64]) -> Vec<u64> {
        let mut counts = vec![0u64; self.bucket_count()];
        for &x in data {
            counts[self.bucket_of(x)] += 1;
        }
        counts
    }
}

/// Output of [`private_histogram`].
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyCounts {
    pub counts: Vec<f64>,
    /// Laplace scale (pure, approx) or Gaussian standard deviation (zCDP).
    pub noise_scale: f64,
    pub budget: PrivacyBudget,
}

impl NoisyCounts {
    /// Bucket with the largest released count; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        best
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Release threshold of the stability-based (ε, δ) histogram.
pub fn stability_threshold(epsilon: f64, delta: f64) -> f64 {
    1.0 + 2.0 * (2.0 / delta).ln() / epsilon
}

/// Histogram of `data` over `spec` released under `budget`.
///
/// Replacing one record moves one unit between two buckets, so the count
/// vector has ℓ₁ sensitivity 2 and ℓ₂ sensitivity √2.
/// * pure: Lap(2/ε) on every bucket;
/// * zCDP: N(0, 1/ρ) on every bucket;
/// * approx: Lap(2/ε) on nonempty buckets only, and noisy counts below
///   `1 + 2 ln(2/δ)/ε` are released as zero.
pub fn private_histogram<R: Rng + ?Sized>(
    data: &[f64],
    spec: &HistogramSpec,
    budget: &PrivacyBudget,
    rng: &mut R,
) -> Result<NoisyCounts> {
    budget.validate()?;
    let exact = spec.counts(data);
    let (counts, noise_scale) = match *budget {
        PrivacyBudget::Pure { epsilon } => {
            let scale = 2.0 / epsilon;
            (exact.iter().map(|&c| c as f64 + sample_laplace(scale, rng)).collect(), scale)
        }
        PrivacyBudget::Zcdp { rho } => {
            let sd = 1.0 / rho.sqrt();
            (exact.iter().map(|&c| c as f64 + sample_gaussian(sd, rng)).collect(), sd)
        }
        PrivacyBudget::Approx { epsilon, delta } => {
            let scale = 2.0 / epsilon;
            let threshold = stability_threshold(epsilon, delta);
            let released = exact
                .iter()
                .map(|&c| {
                    if c == 0 {
                        return 0.0;
                    }
                    let noisy = c as f64 + sample_laplace(scale, rng);
                    if noisy >= threshold {
                        noisy
                    } else {
                        0.0
                    }
                })
                .collect();
            (released, scale)
        }
    };
    Ok(NoisyCounts { counts, noise_scale, budget: *budget })
}
