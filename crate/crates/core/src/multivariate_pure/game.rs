use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::CandidateGrid;
use crate::data::GroupedDataset;
use crate::error::{Error, Result};
use crate::multivariate_zcdp::distance_sq;
use crate::univariate::median_of_means;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchOutcome {
    Tie,
    Win,
    Lose,
}

/// Pairs closer than `TIE_RADIUS · α` always tie.
pub const TIE_RADIUS: f64 = 20.0;

/// Unit direction from `p` to `q` and the distance between them.
fn direction(p: &[f64], q: &[f64]) -> Result<(Vec<f64>, f64)> {
    if p.len() != q.len() {
        return Err(Error::param("p and q have different dimensions"));
    }
    let dist = distance_sq(p, q).sqrt();
    if dist == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    Ok((q.iter().zip(p).map(|(a, b)| (a - b) / dist).collect(), dist))
}

fn project(x: &[f64], p: &[f64], u: &[f64], xi: f64) -> f64 {
    let t: f64 = x.iter().zip(p).zip(u).map(|((x, p), u)| (x - p) * u).sum();
    t.clamp(-xi, xi)
}

/// Coordinate of each point along `(q − p)/‖q − p‖` with origin `p`,
/// clamped to `[−ξ, ξ]`.
pub fn project_clamp<'a>(
    points: impl IntoIterator<Item = &'a [f64]>,
    p: &[f64],
    q: &[f64],
    xi: f64,
) -> Result<Vec<f64>> {
    let (u, _) = direction(p, q)?;
    Ok(points.into_iter().map(|x| project(x, p, &u, xi)).collect())
}

/// Clamped projections grouped as in `groups`, plus the coordinate of `q`.
fn grouped_projections(groups: &GroupedDataset, p: &[f64], q: &[f64], xi: f64) -> Result<(Vec<Vec<f64>>, f64)> {
    if groups.dim() != p.len() {
        return Err(Error::param("candidate dimension does not match the data"));
    }
    let (u, dist) = direction(p, q)?;
    let projected = (0..groups.groups()).map(|g| groups.group(g).map(|x| project(x, p, &u, xi)).collect()).collect();
    Ok((projected, dist))
}

/// Outcome for `p` of its match against `q`.
///
/// Ties when `‖p − q‖ ≤ 20α`. Otherwise the median `μ′` of the group means
/// of the clamped projections decides: `p` wins when `μ′` is strictly closer
/// to `p` (coordinate 0) than to `q` (coordinate `‖p − q‖`).
pub fn match_outcome(groups: &GroupedDataset, p: &[f64], q: &[f64], xi: f64, alpha: f64) -> Result<MatchOutcome> {
    if groups.is_empty() {
        return Err(Error::param("match needs at least one group"));
    }
    let dist = distance_sq(p, q).sqrt();
    if dist <= TIE_RADIUS * alpha {
        return Ok(MatchOutcome::Tie);
    }
    let (projected, s_q) = grouped_projections(groups, p, q, xi)?;
    let means: Vec<f64> = projected.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect();
    let mu = median_of_means(&means)?;
    Ok(if mu.abs() < (s_q - mu).abs() { MatchOutcome::Win } else { MatchOutcome::Lose })
}

/// Fewest points of the data that must be changed so that `p` loses to
/// `q` (ignoring the tie rule), or `None` if no change can make it lose.
///
/// `p` loses exactly when the median group mean reaches the midpoint
/// `h = ‖p − q‖/2`. A changed point can take any clamped projection, so the
/// cheapest way to lift one group is to move its smallest projections to
/// `ξ`; the median then needs the `(m+1)/2` cheapest groups lifted.
pub fn defeat_cost(groups: &GroupedDataset, p: &[f64], q: &[f64], xi: f64) -> Result<Option<usize>> {
    let (projected, dist) = grouped_projections(groups, p, q, xi)?;
    let h = dist / 2.0;
    if h > xi {
        return Ok(None);
    }
    let mut costs: Vec<usize> = projected
        .into_iter()
        .map(|mut values| {
            let g = values.len() as f64;
            let mut sum: f64 = values.iter().sum();
            values.sort_unstable_by(f64::total_cmp);
            let mut changed = 0;
            while sum / g < h && changed < values.len() {
                sum += xi - values[changed];
                changed += 1;
            }
            changed
        })
        .collect();
    let need = costs.len().div_ceil(2);
    costs.select_nth_unstable(need - 1);
    Ok(Some(costs[..need].iter().sum()))
}

/// Score cap `⌈nα⌉` for `n` grouped points.
pub fn score_cap(n: usize, alpha: f64) -> usize {
    (n as f64 * alpha).ceil() as usize
}

/// Fewest changed points that make `p` lose to some non-tied candidate,
/// capped at `⌈nα⌉`; the cap is also the score when no candidate can ever
/// beat `p`.
pub fn score(groups: &GroupedDataset, p: &[f64], grid: &CandidateGrid, xi: f64, alpha: f64) -> Result<usize> {
    let cap = score_cap(groups.len(), alpha);
    let mut best = cap;
    for q in grid.iter() {
        if distance_sq(p, q).sqrt() <= TIE_RADIUS * alpha {
            continue;
        }
        if let Some(cost) = defeat_cost(groups, p, q, xi)? {
            best = best.min(cost);
            if best == 0 {
                break;
            }
        }
    }
    Ok(best)
}

/// Scores of every candidate of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub scores: Vec<usize>,
    pub cap: usize,
}

impl ScoreTable {
    pub fn compute(groups: &GroupedDataset, grid: &CandidateGrid, xi: f64, alpha: f64) -> Result<Self> {
        let scores = (0..grid.len())
            .into_par_iter()
            .map(|i| score(groups, grid.point(i), grid, xi, alpha))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreTable { scores, cap: score_cap(groups.len(), alpha) })
    }

    pub fn max(&self) -> usize {
        self.scores.iter().copied().max().unwrap_or(0)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.scores.iter().map(|&s| s as f64).collect()
    }
}
