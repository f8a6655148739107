use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trials::{bonferroni_z, wilson_interval};
use crate::error::{ensure_positive, Error, Result};
use crate::mechanisms::{exponential_mechanism, private_histogram, sample_laplace, HistogramSpec, PrivacyBudget};
use crate::rng::{stream, SimRng};

/// Draws per rng stream; audits split their draws into chunks this size.
const CHUNK: usize = 1 << 14;

/// Family-wise level of the per-bin confidence intervals.
const AUDIT_LEVEL: f64 = 0.05;

/// Mechanisms with built-in neighboring inputs for auditing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditMechanism {
    /// Counting query with Laplace noise of scale 1/ε, counts 0 and 1.
    Laplace,
    /// Same query with the noise scale halved: not ε-DP.
    LaplaceHalfNoise,
    /// Argmax of a pure-DP histogram; one record moves between buckets.
    HistogramArgmax,
    /// Exponential mechanism on score vectors differing by at most 1.
    Exponential,
}

impl std::str::FromStr for AuditMechanism {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown audit mechanism {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub epsilon: f64,
    pub draws: usize,
    pub bins: usize,
    /// Output counts per bin under the two neighboring inputs.
    pub counts: Vec<(u64, u64)>,
    /// Largest `|ln(freq/freq′)|` over bins where both counts are nonzero.
    pub max_log_ratio: f64,
    /// Largest lower confidence bound of `|ln(p/p′)|` over bins.
    pub max_lower_bound: f64,
    pub violation: bool,
    pub power_warning: Option<String>,
}

/// Frequency-ratio audit: runs each side `draws` times, bins the outputs
/// and flags a violation when some bin's log-ratio lower confidence bound
/// (Wilson intervals, Bonferroni-adjusted across bins and sides) exceeds ε.
pub fn audit_frequencies<F, G>(
    run: F,
    run_neighbor: G,
    bins: usize,
    epsilon: f64,
    draws: usize,
    seed: u64,
) -> Result<AuditReport>
where
    F: Fn(&mut SimRng) -> usize + Sync,
    G: Fn(&mut SimRng) -> usize + Sync,
{
    ensure_positive("epsilon", epsilon)?;
    if bins == 0 || draws == 0 {
        return Err(Error::param("audit needs at least one bin and one draw"));
    }
    let chunks = draws.div_ceil(CHUNK);
    let histogram = |side: u64, f: &(dyn Fn(&mut SimRng) -> usize + Sync)| -> Result<Vec<u64>> {
        let partial: Vec<Vec<u64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream(seed, 2 * c as u64 + side);
                let mut counts = vec![0u64; bins];
                let len = CHUNK.min(draws - c * CHUNK);
                for _ in 0..len {
                    let b = f(&mut rng);
                    counts[b.min(bins - 1)] += 1;
                }
                counts
            })
            .collect();
        Ok(partial.into_iter().fold(vec![0u64; bins], |mut acc, c| {
            acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
            acc
        }))
    };
    let a = histogram(0, &run)?;
    let b = histogram(1, &run_neighbor)?;

    let z = bonferroni_z(AUDIT_LEVEL, 2 * bins);
    let mut max_log_ratio: f64 = 0.0;
    let mut max_lower_bound: f64 = 0.0;
    for (&ca, &cb) in a.iter().zip(&b) {
        if ca > 0 && cb > 0 {
            max_log_ratio = max_log_ratio.max((ca as f64 / cb as f64).ln().abs());
        }
        let (a_lo, a_hi) = wilson_interval(ca as usize, draws, z);
        let (b_lo, b_hi) = wilson_interval(cb as usize, draws, z);
        let lower = (a_lo / b_hi).ln().max((b_lo / a_hi).ln()).max(0.0);
        max_lower_bound = max_lower_bound.max(lower);
    }
    let power_warning = (draws < 30 * bins)
        .then(|| format!("{draws} draws are too few to resolve {bins} bins; use at least {}", 30 * bins));
    Ok(AuditReport {
        epsilon,
        draws,
        bins,
        counts: a.into_iter().zip(b).collect(),
        max_log_ratio,
        max_lower_bound,
        violation: max_lower_bound > epsilon,
        power_warning,
    })
}

/// Bins of width `width` over `[lo, lo + width·inner)` plus one tail bin on
/// each side.
fn bin_of(y: f64, lo: f64, width: f64, inner: usize) -> usize {
    let t = ((y - lo) / width).floor();
    if t < 0.0 {
        0
    } else if t >= inner as f64 {
        inner + 1
    } else {
        t as usize + 1
    }
}

/// Audits one of the built-in mechanisms at privacy level ε.
pub fn privacy_audit(mechanism: AuditMechanism, epsilon: f64, draws: usize, seed: u64) -> Result<AuditReport> {
    ensure_positive("epsilon", epsilon)?;
    match mechanism {
        AuditMechanism::Laplace | AuditMechanism::LaplaceHalfNoise => {
            let scale = if mechanism == AuditMechanism::Laplace { 1.0 / epsilon } else { 0.5 / epsilon };
            let width = 0.5 / epsilon;
            let lo = -6.0 / epsilon;
            let inner = 26;
            let release =
                move |count: f64| move |rng: &mut SimRng| bin_of(count + sample_laplace(scale, rng), lo, width, inner);
            audit_frequencies(release(0.0), release(1.0), inner + 2, epsilon, draws, seed)
        }
        AuditMechanism::HistogramArgmax => {
            let spec = HistogramSpec::new(vec![0.0, 1.0, 2.0, 3.0, 4.0])?;
            let budget = PrivacyBudget::pure(epsilon)?;
            // one record moves from bucket 0 to bucket 1
            let x = [vec![0.5; 5], vec![1.5; 5], vec![2.5; 4]].concat();
            let mut x_prime = x.clone();
            x_prime[0] = 1.5;
            let release = |data: Vec<f64>| {
                let spec = spec.clone();
                move |rng: &mut SimRng| private_histogram(&data, &spec, &budget, rng).expect("valid histogram").argmax()
            };
            audit_frequencies(release(x), release(x_prime), 4, epsilon, draws, seed)
        }
        AuditMechanism::Exponential => {
            let release = |scores: [f64; 4]| {
                move |rng: &mut SimRng| exponential_mechanism(&scores, 1.0, epsilon, rng).expect("valid scores")
            };
            audit_frequencies(release([0.0, 1.0, 2.0, 1.0]), release([1.0, 0.0, 2.0, 2.0]), 4, epsilon, draws, seed)
        }
    }
}
