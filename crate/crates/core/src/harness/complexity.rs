use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::trials::run_trial_range;
use crate::constants::SampleCheck;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Ratio between consecutive grid points.
    pub factor: f64,
    /// First grid point; defaults to the smallest size the estimator runs on.
    pub start: Option<usize>,
    pub cap: usize,
    /// Required success rate is the target probability minus this.
    pub slack: f64,
    /// Once the coarse grid brackets `n*`, the bracket is split into this
    /// many geometric steps and searched again; 1 disables refinement.
    pub refine: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { factor: 1.3, start: None, cap: 1 << 30, slack: 0.05, refine: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub successes: usize,
    /// Trials actually run; evaluation stops once the outcome is decided.
    pub trials_run: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n_star: usize,
    pub threshold: f64,
    pub grid: Vec<GridPoint>,
}

/// Smallest `n` on the geometric grid whose empirical success rate over
/// `config.trials` trials reaches `target − slack`. Sample-size checks are
/// disabled so the estimator runs below its bound.
pub fn sample_complexity_search(config: &ExperimentConfig, options: &SearchOptions) -> Result<SearchResult> {
    config.validate()?;
    if !(options.factor > 1.0) {
        return Err(Error::Config(format!("grid factor must exceed 1, got {}", options.factor)));
    }
    let threshold = config.target_probability() - options.slack;
    let trials = config.trials;
    let need = (threshold * trials as f64 - 1e-9).ceil().max(0.0) as usize;
    let chunk = (2 * rayon::current_num_threads()).max(8) as u64;
    let evaluate = |n: usize| -> Result<GridPoint> {
        let (mut successes, mut run) = (0usize, 0usize);
        while run < trials && successes < need && run - successes <= trials - need {
            let end = (run as u64 + chunk).min(trials as u64);
            let records = run_trial_range(config, n, SampleCheck::Skip, run as u64..end)?;
            successes += records.iter().filter(|r| r.success).count();
            run = end as usize;
        }
        Ok(GridPoint { n, successes, trials_run: run, passed: successes >= need })
    };

    let mut n = options.start.unwrap_or(config.minimum_n()?);
    let mut grid = Vec::new();
    let mut last_failed = None;
    while n <= options.cap {
        let point = evaluate(n)?;
        grid.push(point);
        if point.passed {
            if let Some(lo) = last_failed {
                for i in 1..options.refine.max(1) {
                    let m = ((lo as f64) * options.factor.powf(i as f64 / options.refine as f64)).ceil() as usize;
                    if m <= lo || m >= n {
                        continue;
                    }
                    let inner = evaluate(m)?;
                    grid.push(inner);
                    if inner.passed {
                        return Ok(SearchResult { n_star: m, threshold, grid });
                    }
                }
            }
            return Ok(SearchResult { n_star: n, threshold, grid });
        }
        last_failed = Some(n);
        n = ((n as f64) * options.factor).ceil() as usize;
    }
    Err(Error::SearchFailed { cap: options.cap, target: threshold })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub k: f64,
    pub pairs: Vec<(f64, usize)>,
    /// Least-squares slope of `ln n*` against `ln(1/α)`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual on the log scale.
    pub residual: f64,
}

/// Fits `n* ≈ C·(1/α)^slope` from at least four `(α, n*)` pairs spanning a
/// factor of four in α, with `n*` nonincreasing in α.
pub fn exponent_fit(k: f64, pairs: &[(f64, usize)]) -> Result<ExponentFit> {
    if pairs.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 pairs, got {}", pairs.len())));
    }
    if pairs.iter().any(|&(a, n)| !(a > 0.0) || n == 0) {
        return Err(Error::Fit("alphas and sample sizes must be positive".into()));
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = (sorted[0].0, sorted[sorted.len() - 1].0);
    if hi / lo < 4.0 {
        return Err(Error::Fit(format!("alphas span only a factor {:.3}", hi / lo)));
    }
    if sorted.windows(2).any(|w| w[1].1 > w[0].1) {
        return Err(Error::Fit("sample sizes must not grow with alpha".into()));
    }
    let xs: Vec<f64> = sorted.iter().map(|p| (1.0 / p.0).ln()).collect();
    let ys: Vec<f64> = sorted.iter().map(|p| (p.1 as f64).ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all alphas are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / m).sqrt();
    Ok(ExponentFit { k, pairs: sorted, slope, intercept, residual })
}
