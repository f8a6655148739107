use rand::Rng;
use serde::{Deserialize, Serialize};

use super::game::ScoreTable;
use super::grid::{CandidateGrid, DEFAULT_GRID_CAP};
use crate::constants::{check_samples, SampleCheck, SampleConstants};
use crate::data::{ceil_odd, GroupedDataset, PointSet};
use crate::error::{ensure_open_unit, ensure_positive, Error, Result};
use crate::mechanisms::{exponential_mechanism, PrivacyBudget, PrivacyLedger};
use crate::moments::MomentModel;
use crate::univariate::UnivariateMean;

/// Projection clamp `60/α^{1/(k−1)}`.
pub fn projection_radius(alpha: f64, model: &MomentModel) -> f64 {
    60.0 / alpha.powf(model.radius_exponent())
}

/// Group count `⌈400 d ln(8√d/β)⌉`, rounded up to odd.
pub fn match_groups(d: usize, beta: f64) -> usize {
    let df = d as f64;
    ceil_odd(400.0 * df * (8.0 * df.sqrt() / beta).ln())
}

/// Pure-DP high-dimensional mean by selection from a grid cover.
///
/// The first half of the `2n` input points yields a coordinate-wise rough
/// center (univariate estimator at accuracy α with budget ε/(2d) per
/// coordinate); the candidate grid around it is scored on the second half,
/// split into [`match_groups`] groups, and one candidate is released by the
/// exponential mechanism with budget ε/2. The output lies within 20α of the
/// mean with probability 1 − β at the sample bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureHighDimMean {
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub model: MomentModel,
    pub constants: SampleConstants,
    pub check: SampleCheck,
    pub grid_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureHighDimEstimate {
    pub mean: Vec<f64>,
    pub center: Vec<f64>,
    pub grid_size: usize,
    pub scores: ScoreTable,
    pub selected: usize,
    pub ledger: PrivacyLedger,
}

impl PureHighDimMean {
    pub fn new(epsilon: f64, alpha: f64, beta: f64, model: MomentModel) -> Result<Self> {
        ensure_positive("epsilon", epsilon)?;
        ensure_positive("alpha", alpha)?;
        ensure_open_unit("beta", beta)?;
        model.validate()?;
        Ok(PureHighDimMean {
            epsilon,
            alpha,
            beta,
            model,
            constants: SampleConstants::default(),
            check: SampleCheck::Enforce,
            grid_cap: DEFAULT_GRID_CAP,
        })
    }

    pub fn with_constants(mut self, constants: SampleConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_check(mut self, check: SampleCheck) -> Self {
        self.check = check;
        self
    }

    pub fn with_grid_cap(mut self, cap: usize) -> Self {
        self.grid_cap = cap;
        self
    }

    fn centering_coordinate(&self, d: usize) -> Result<UnivariateMean> {
        let df = d as f64;
        Ok(UnivariateMean::new(
            PrivacyBudget::pure(self.epsilon / (2.0 * df))?,
            self.alpha,
            self.beta / (2.0 * df),
            self.model,
        )?
        .with_constants(self.constants)
        .with_check(SampleCheck::Skip))
    }

    /// Required input length `2n` in dimension `d`.
    pub fn required_samples(&self, d: usize) -> Result<usize> {
        if d == 0 {
            return Err(Error::param("dimension must be positive"));
        }
        let df = d as f64;
        let a = self.alpha;
        let l = (df / self.beta).ln();
        let inner = df * l / (a * a)
            + df * l / (self.epsilon * a.powf(self.model.privacy_exponent()))
            + df * self.model.range.ln() * l / self.epsilon;
        let half = ((self.constants.c4 * inner).ceil() as usize)
            .max(self.centering_coordinate(d)?.required_samples())
            .max(match_groups(d, self.beta));
        Ok(2 * half)
    }

    pub fn estimate<R: Rng + ?Sized>(&self, data: &PointSet, rng: &mut R) -> Result<PureHighDimEstimate> {
        let d = data.dim();
        check_samples(self.check, "pure high-dimensional mean", self.required_samples(d)?, data.len())?;
        let n = data.len() / 2;
        let (y, z) = (data.slice(0, n), data.slice(n, 2 * n));
        let mut ledger = PrivacyLedger::new();
        let coord = self.centering_coordinate(d)?;
        let mut center = Vec::with_capacity(d);
        for axis in 0..d {
            let est = coord.estimate(&y.column(axis), rng)?;
            center.push(est.mean);
            ledger.absorb(&format!("center[{axis}]"), est.ledger);
        }

        let grid = CandidateGrid::build(&center, self.alpha, self.grid_cap)?;
        let groups = GroupedDataset::split(&z, match_groups(d, self.beta))?;
        let xi = projection_radius(self.alpha, &self.model);
        let scores = ScoreTable::compute(&groups, &grid, xi, self.alpha)?;
        let selection_eps = self.epsilon / 2.0;
        let selected = exponential_mechanism(&scores.as_f64(), 1.0, selection_eps, rng)?;
        ledger.charge("exponential mechanism", PrivacyBudget::Pure { epsilon: selection_eps });
        Ok(PureHighDimEstimate {
            mean: grid.point(selected).to_vec(),
            center,
            grid_size: grid.len(),
            scores,
            selected,
            ledger,
        })
    }
}

/// Pure-DP high-dimensional mean with default constants.
pub fn pdp_highd_mean<R: Rng + ?Sized>(
    data: &PointSet,
    epsilon: f64,
    alpha: f64,
    beta: f64,
    model: &MomentModel,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(PureHighDimMean::new(epsilon, alpha, beta, *model)?.estimate(data, rng)?.mean)
}
